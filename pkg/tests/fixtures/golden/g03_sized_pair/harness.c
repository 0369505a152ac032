/*
 * Proof harness for targetFunc.
 * Generated from a harness spec; edit the spec, not this file.
 */
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

#include "proof_intrinsics.h"

extern int targetFunc(char *data, size_t len);

void harness(void)
{
    size_t len;
    char *data = malloc(len);
    PROOF_ASSUME(data != NULL);
    targetFunc(data, len);
}
