#include <stddef.h>
#include <stdint.h>

struct pkt_node {
    struct pkt_node *next;
    uint16_t len;
    uint8_t data[32];
};

uint32_t chain_sum(const struct pkt_node *head)
{
    uint32_t total = 0;
    const struct pkt_node *p = head;
    while (p != NULL) {
        if (p->len < sizeof(p->data)) {
            total += p->data[p->len];
        }
        p = p->next;
    }
    return total;
}
