/*
 * Proof harness for copy_into.
 * Generated from a harness spec; edit the spec, not this file.
 */
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

#include "proof_intrinsics.h"

extern int copy_into(uint8_t *dst, const uint8_t *src, size_t len);

void harness(void)
{
    size_t len;
    uint8_t *dst = malloc(len);
    PROOF_ASSUME(dst != NULL);
    size_t src_size;
    const uint8_t *src = malloc(src_size);
    PROOF_ASSUME(src != NULL);
    copy_into(dst, src, len);
}
