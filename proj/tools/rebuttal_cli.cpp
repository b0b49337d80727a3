#include <iostream>

#include "rebuttal/cli.hpp"

int main(int argc, char** argv) { return rebuttal::cli_dispatch(argc, argv, std::cout, std::cerr); }
