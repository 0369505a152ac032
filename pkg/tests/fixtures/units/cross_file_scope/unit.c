#include <stddef.h>
#include <stdint.h>
#include <string.h>

struct frame_entry {
    uint16_t len;
    uint16_t off;
    uint8_t body[48];
};

struct frame_entry *table_lookup(uint16_t id);

int route_frame(uint16_t id, const uint8_t *payload, size_t payload_len)
{
    struct frame_entry *e = table_lookup(id);
    if (e->len > sizeof(e->body)) {
        return -1;
    }
    size_t n = payload_len > e->len ? e->len : payload_len;
    memcpy(e->body + e->off, payload, n);
    return 0;
}
