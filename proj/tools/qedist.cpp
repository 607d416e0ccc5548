#include "qedist/cli.hpp"

int main(int argc, char** argv) { return qedist::cli_main(argc, argv); }
