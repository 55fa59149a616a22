#include <iostream>

#include "sandpile/cli.hpp"

int main(int argc, char** argv) { return sandpile::cli::main(argc, argv, std::cout, std::cerr); }
