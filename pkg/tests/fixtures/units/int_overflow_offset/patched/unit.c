#include <stddef.h>
#include <stdint.h>
#include <string.h>

int rbuf_add(uint8_t *rbuf, size_t rbuf_len, const uint8_t *frag,
             uint16_t offset, uint16_t frag_size)
{
    if ((size_t)offset + (size_t)frag_size > rbuf_len) {
        return -1;
    }
    memcpy(rbuf + offset, frag, frag_size);
    return 0;
}
