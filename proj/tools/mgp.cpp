#include "mgp/cli.hpp"

#include <iostream>

int main(int argc, char** argv) { return mgp::run_cli(argc, argv, std::cout, std::cerr); }
