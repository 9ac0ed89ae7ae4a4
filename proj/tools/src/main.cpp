#include <iostream>

#include "rankdeg_cli/commands.hpp"

int main(int argc, char** argv) { return rankdeg::cli::run(argc, argv, std::cout, std::cerr); }
