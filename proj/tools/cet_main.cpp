#include <iostream>

#include "cet/cli.hpp"

int main(int argc, char** argv) { return cet::cli::run(argc, argv, std::cout, std::cerr); }
