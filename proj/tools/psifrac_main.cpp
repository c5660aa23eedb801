#include "psifrac/cli.hpp"

int main(int argc, char** argv) { return psifrac::cli::run(argc, argv); }
