#include <iostream>

#include "spinboson/cli.hpp"

int main(int argc, char** argv) { return spinboson::run_cli(argc, argv, std::cout, std::cerr); }
