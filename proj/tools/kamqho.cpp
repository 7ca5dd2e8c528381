#include <iostream>

#include "kamqho/cli.hpp"

int main(int argc, char** argv) { return kamqho::run_command(argc, argv, std::cout, std::cerr); }
