#include <iostream>

#include "zorich/cli.hpp"

int main(int argc, char** argv) { return zorich::cli::run(argc, argv, std::cout, std::cerr); }
