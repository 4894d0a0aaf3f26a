#include <iostream>

#include "cdop/cli.hpp"

int main(int argc, char** argv) { return cdop::cli::run(argc, argv, std::cout, std::cerr); }
