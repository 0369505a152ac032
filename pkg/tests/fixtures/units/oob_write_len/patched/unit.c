#include <stddef.h>
#include <stdint.h>
#include <string.h>

struct frame_ctx {
    uint32_t seq[3];
    uint8_t payload[64];
};

struct frame_ctx *get_current_ctx(void);

int frame_store(char *data, size_t len)
{
    struct frame_ctx *ctx = get_current_ctx();
    uint32_t acc = 0;
    for (int i = 0; i < 3; i++) {
        acc += ctx->seq[i];
    }
    if (len > sizeof(ctx->payload)) {
        return -1;
    }
    memcpy(ctx->payload, data, len);
    return (int)acc;
}
