#include <stddef.h>
#include <stdint.h>

static size_t depth_of(const uint8_t *, size_t, size_t);

static size_t child_depth(const uint8_t *tree, size_t tree_len, size_t node)
{
    return depth_of(tree, tree_len, node + 1);
}

static size_t depth_of(const uint8_t *tree, size_t tree_len, size_t node)
{
    if (node > tree_len) {
        return 0;
    }
    if (tree[node] == 0) {
        return 1;
    }
    return 1 + child_depth(tree, tree_len, node);
}

size_t tree_depth(const uint8_t *tree, size_t tree_len)
{
    return depth_of(tree, tree_len, 0);
}
