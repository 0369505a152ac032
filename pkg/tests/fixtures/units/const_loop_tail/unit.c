#include <stddef.h>
#include <stdint.h>

uint32_t crc_block(const uint8_t *data, size_t data_len)
{
    uint32_t acc = 0xffffffffu;
    for (int round = 0; round < 8; round++) {
        acc = (acc << 1) ^ (uint32_t)round;
    }
    acc ^= data[8];
    return acc;
}
