#include <iostream>

#include "scalefn/cli.hpp"

int main(int argc, char** argv) { return scalefn::cli::main_entry(argc, argv, std::cout, std::cerr); }
