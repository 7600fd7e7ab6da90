#include "cli.hpp"

#include <iostream>

int main(int argc, char** argv) { return teleclone::cli::run(argc, argv, std::cout, std::cerr); }
