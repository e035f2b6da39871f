#include <iostream>

#include "wishlab/harness.hpp"

int main(int argc, char** argv) { return wishlab::run_cli(argc, argv, std::cout, std::cerr); }
