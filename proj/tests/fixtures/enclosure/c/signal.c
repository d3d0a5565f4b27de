#include <signal.h>

static volatile int stop;

static void on_signal(int sig)
{
    (void)sig;
    stop = 1;
}

int install(void)
{
    struct sigaction sa = {0};
    sa.sa_handler = on_signal;
    if (sigaction(SIGINT, &sa, NULL) != 0) {
        return -1;
    }
    return 0;
}

int main(int argc, char **argv)
{
    (void)argc;
    (void)argv;
    return install();
}
