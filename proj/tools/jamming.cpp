#include "jamming/cli.hpp"

int main(int argc, char** argv) { return jamming::cli::main(argc, argv); }
