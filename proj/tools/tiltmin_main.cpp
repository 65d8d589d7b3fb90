#include <iostream>

#include "tiltmin/cli.hpp"

int main(int argc, char** argv) { return tiltmin::cli_main(argc, argv, std::cout, std::cerr); }
