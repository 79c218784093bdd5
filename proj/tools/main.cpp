#include <iostream>

#include "nestsearch/cli.hpp"

int main(int argc, char** argv) { return nestsearch::cli::run(argc, argv, std::cout, std::cerr); }
