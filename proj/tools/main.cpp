#include "evstep/cli.hpp"

int main(int argc, char** argv) { return evstep::cli_main(argc, argv); }
