#include "tecue_cli/cli.hpp"

#include <iostream>

int main(int argc, char** argv) { return tecue::cli::run_cli(argc, argv, std::cout, std::cerr); }
