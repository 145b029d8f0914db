#include <iostream>

#include "neuroloop/cli.hpp"

int main(int argc, char** argv) { return neuroloop::run_cli(argc, argv, std::cout, std::cerr); }
