#include "heatwave/cli.hpp"

#include <iostream>

int main(int argc, char** argv) { return heatwave::run_cli(argc, argv, std::cout, std::cerr); }
