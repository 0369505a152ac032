#include <stddef.h>
#include <stdint.h>

typedef int (*op_handler)(uint8_t arg);

static int default_op(uint8_t arg)
{
    return (int)arg;
}

static op_handler handlers[4] = {
    default_op, default_op, default_op, default_op
};

int dispatch_op(uint8_t op, uint8_t arg, op_handler trace_hook)
{
    if (trace_hook != 0) {
        trace_hook(arg);
    }
    handlers[op & 0x03] = default_op;
    return handlers[op & 0x03](arg);
}
