#include <stddef.h>

struct name_cfg {
    char name[32];
    int used;
};

int set_name(struct name_cfg *cfg, const char *src)
{
    size_t n = 0;
    while (src[n] != '\0') {
        if (n >= 31) {
            return -1;
        }
        cfg->name[n] = src[n];
        n++;
    }
    cfg->name[n] = '\0';
    cfg->used = 1;
    return 0;
}
