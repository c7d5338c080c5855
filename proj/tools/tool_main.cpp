#include <iostream>

#include "sca/cli.hpp"

int main(int argc, char** argv) { return sca::cli::dispatch(argc, argv, std::cout, std::cerr); }
