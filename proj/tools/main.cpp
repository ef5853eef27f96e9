#include "zitter_cli/commands.hpp"

int main(int argc, char** argv) { return zitter::cli::run(argc, argv); }
