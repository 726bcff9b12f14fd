#include "entangle/cli.hpp"

#include <iostream>

int main(int argc, char** argv) { return entangle::cli::run(argc, argv, std::cout, std::cerr); }
