#include <iostream>

#include "exes/cli.hpp"

int main(int argc, char** argv) { return exes::run_cli(argc, argv, std::cout, std::cerr); }
