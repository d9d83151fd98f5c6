#include <backaction/cli.hpp>

#include <iostream>

int main(int argc, char** argv) { return backaction::cli::main(argc, argv, std::cout, std::cerr); }
