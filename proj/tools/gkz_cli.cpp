#include <iostream>

#include "gkz/cli.hpp"

int main(int argc, char** argv) { return gkz::cli::run_cli(argc, argv, std::cout, std::cerr); }
