#include <iostream>

#include "itp/cli.hpp"

int main(int argc, char** argv) { return itp::run_cli(argc, argv, std::cout, std::cerr); }
