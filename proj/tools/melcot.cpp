#include "melcot/cli/cli.hpp"

int main(int argc, char** argv) { return melcot::cli::run(argc, argv); }
