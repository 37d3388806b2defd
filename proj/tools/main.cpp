#include <iostream>

#include "svlab/cli.hpp"

int main(int argc, char** argv) { return svlab::cli::dispatch(argc, argv, std::cout, std::cerr); }
