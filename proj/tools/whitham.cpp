#include <iostream>

#include "whitham/cli.hpp"

int main(int argc, char** argv) { return whitham::cli_main(argc, argv, std::cout, std::cerr); }
