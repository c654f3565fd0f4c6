#include <iostream>

#include "pgreen/cli/commands.hpp"

int main(int argc, char** argv) { return pgreen::cli::run(argc, argv, std::cout, std::cerr); }
