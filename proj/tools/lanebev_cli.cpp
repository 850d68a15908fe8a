#include <iostream>

#include "lanebev/cli.hpp"

int main(int argc, char** argv) { return lanebev::run_cli(argc, argv, std::cout, std::cerr); }
