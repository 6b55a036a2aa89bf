#include <iostream>

#include "twostage_cli/cli.hpp"

int main(int argc, char** argv) { return twostage::cli::run(argc, argv, std::cout, std::cerr); }
