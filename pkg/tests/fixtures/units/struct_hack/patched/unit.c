#include <stddef.h>
#include <stdint.h>

struct msg_head {
    uint16_t kind;
    uint16_t payload_len;
    uint8_t payload[];
};

int msg_digest(const uint8_t *raw, size_t raw_len)
{
    const struct msg_head *m = (const struct msg_head *)raw;
    uint32_t acc = 0;
    if (raw_len < 4) {
        return -1;
    }
    if (raw_len < 5 || m->payload_len == 0
            || m->payload_len > raw_len - 4) {
        return -2;
    }
    acc = m->kind;
    acc ^= m->payload[0];
    acc ^= m->payload[m->payload_len - 1];
    return (int)acc;
}
