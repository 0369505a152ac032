/*
 * Proof harness for dispatch.
 * Generated from a harness spec; edit the spec, not this file.
 */
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

#include "proof_intrinsics.h"

extern int dispatch(int (*cb)(int, char *), uint8_t op);

void harness(void)
{
    int (*cb)(int, char *);
    uint8_t op;
    dispatch(cb, op);
}
