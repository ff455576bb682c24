#include <iostream>

#include "ietskew/cli.hpp"

int main(int argc, char** argv) { return ietskew::run_cli(argc, argv, std::cout, std::cerr); }
