#include "iwt/cli.hpp"

#include <iostream>

int main(int argc, char** argv) { return iwt::cli::run(argc, argv, std::cout, std::cerr); }
