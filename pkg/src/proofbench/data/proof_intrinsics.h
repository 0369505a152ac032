/*
 * Thin shim over the checker's verification intrinsics.
 *
 * Under the checker (__CPROVER defined) the macros expand to the real
 * intrinsics. Under a plain compiler they expand to typed no-ops so a
 * generated harness stays compile-checkable without the checker installed.
 */
#ifndef PROOF_INTRINSICS_H
#define PROOF_INTRINSICS_H

#include <stddef.h>

#ifdef __CPROVER

#define PROOF_ASSUME(cond) __CPROVER_assume(cond)
#define PROOF_ASSERT(cond, msg) __CPROVER_assert((cond), (msg))
#define PROOF_OBJECT_SIZE(ptr) __CPROVER_OBJECT_SIZE(ptr)

#else /* plain compiler: keep the expressions type-checked, discard them */

#define PROOF_ASSUME(cond) ((void)(cond))
#define PROOF_ASSERT(cond, msg) ((void)(cond), (void)(msg))
#define PROOF_OBJECT_SIZE(ptr) ((void)(ptr), (size_t)0)

#endif

#endif /* PROOF_INTRINSICS_H */
