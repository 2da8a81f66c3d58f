#include <iostream>

#include "lexsimp/cli.hpp"

int main(int argc, char** argv) { return lexsimp::cli::dispatch(argc, argv, std::cout, std::cerr); }
