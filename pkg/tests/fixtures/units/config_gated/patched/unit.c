#include <stddef.h>
#include <stdint.h>

int parse_header(const uint8_t *pkt, size_t pkt_len, uint8_t *out,
                 size_t out_len)
{
    if (pkt_len < 4) {
        return -1;
    }
    out[0] = pkt[0];
#if PKT_AUTH_MODE
    if (out_len < 17) {
        return -1;
    }
    for (size_t i = 0; i < 16; i++) {
        out[1 + i] = (uint8_t)(i + 0x5a);
    }
#endif
    return (int)pkt[1];
}
