#include <iostream>

#include "iwsim/cli/commands.hpp"

int main(int argc, char** argv) { return iwsim::cli::dispatch(argc, argv, std::cout, std::cerr); }
