#include <iostream>

#include "lvelab/cli.hpp"

int main(int argc, char** argv) { return lvelab::cli::run(argc, argv, std::cout, std::cerr); }
