#include <stddef.h>

union value {
    int i;
    double d;
};

enum kind {
    KIND_INT,
    KIND_DOUBLE
};

size_t
buffer_fill(char *buf, size_t cap, char c)
{
    size_t i;
    for (i = 0; i < cap; i++)
        buf[i] = c;
    /* closing } in a comment */
    return i;
}

const char *quote = "}";
