#include <iostream>

#include "tumod/cli.hpp"

int main(int argc, char** argv) { return tumod::cli::run(argc, argv, std::cout, std::cerr); }
