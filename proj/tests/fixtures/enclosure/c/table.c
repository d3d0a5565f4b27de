#include <string.h>

static const char *names[] = {
    "alpha",
    "beta",
};

typedef struct {
    const char *key;
    int (*handler)(int);
} entry;

static int twice(int x) { return 2 * x; }

static entry table[] = {
    {"twice", twice},
};

int dispatch(const char *key, int x)
{
    for (size_t i = 0; i < sizeof table / sizeof table[0]; ++i) {
        if (strcmp(table[i].key, key) == 0) {
            return table[i].handler(x);
        }
    }
    return -1;
}
