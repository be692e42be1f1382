#include <iostream>

#include "sparsecirc/cli.hpp"

int main(int argc, char** argv) { return sparsecirc::run_cli(argc, argv, std::cout, std::cerr); }
