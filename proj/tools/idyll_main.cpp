// idyll_main.cpp
#include "idyll/cli.hpp"

int main(int argc, char** argv) { return idyll::cli_main(argc, argv); }
