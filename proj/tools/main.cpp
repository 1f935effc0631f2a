#include <iostream>

#include "weakpair/cli.hpp"

int main(int argc, char** argv) { return weakpair::run_cli(argc, argv, std::cout, std::cerr); }
