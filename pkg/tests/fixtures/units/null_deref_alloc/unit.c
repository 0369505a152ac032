#include <stdlib.h>
#include <string.h>

struct conn_state {
    int fd;
    char tag[8];
};

struct conn_state *conn_open(int fd, const char *tag, size_t tag_len)
{
    struct conn_state *st = malloc(sizeof(struct conn_state));
    st->fd = fd;
    if (tag_len > sizeof(st->tag)) {
        tag_len = sizeof(st->tag);
    }
    memcpy(st->tag, tag, tag_len);
    return st;
}
