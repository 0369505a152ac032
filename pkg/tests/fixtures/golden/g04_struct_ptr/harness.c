/*
 * Proof harness for ctx_reset.
 * Generated from a harness spec; edit the spec, not this file.
 */
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

#include "proof_intrinsics.h"

struct ctx;

extern int ctx_reset(struct ctx *c);

void harness(void)
{
    struct ctx *c = malloc(24) /* sizeof(struct ctx) */;
    PROOF_ASSUME(c != NULL);
    ctx_reset(c);
}
