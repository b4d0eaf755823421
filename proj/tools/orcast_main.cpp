#include <iostream>

#include "orcast/cli.hpp"

int main(int argc, char** argv) { return orcast::cli::run(argc, argv, std::cout, std::cerr); }
