#include <stddef.h>
#include <stdint.h>

struct opt_hdr {
    uint8_t flags;
    uint8_t ext_len;
    uint8_t ext[24];
};

int read_options(const struct opt_hdr *hdr, uint8_t *out, size_t out_len)
{
    if (out_len < 1) {
        return -1;
    }
    out[0] = hdr->flags;
    if (hdr->flags & 0x01) {
        out[0] = hdr->ext[hdr->ext_len];
    }
    return 0;
}
