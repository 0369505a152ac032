#include <stddef.h>
#include <stdint.h>

uint32_t block_checksum(const uint8_t *buf, size_t buf_len, size_t count)
{
    uint32_t sum = 0;
    if (count > buf_len) {
        return 0;
    }
    for (size_t i = 0; i < count; i++) {
        sum += buf[i];
    }
    return sum;
}
