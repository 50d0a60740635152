#include "tfde/cli.hpp"

#include <iostream>

int main(int argc, char** argv) { return tfde::run_command(argc, argv, std::cout, std::cerr); }
