#include <iostream>

#include "spop/cli.hpp"

int main(int argc, char** argv) { return spop::run_cli(argc, argv, std::cin, std::cout, std::cerr); }
