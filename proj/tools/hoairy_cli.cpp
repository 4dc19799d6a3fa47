#include <iostream>

#include <hoairy/cli.hpp>

int main(int argc, char** argv) { return hoairy::cli::run(argc, argv, std::cout, std::cerr); }
