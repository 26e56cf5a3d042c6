#include "copguide/cli.hpp"

int main(int argc, char** argv) { return copguide::cli::main(argc, argv); }
