#include <iostream>

#include "factoredq/cli.hpp"

int main(int argc, char** argv) { return factoredq::run_cli(argc, argv, std::cout, std::cerr); }
