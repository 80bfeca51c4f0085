#include <iostream>

#include "bifurcation/commands.hpp"

int main(int argc, char** argv) {
    return bifurcation::cli::run_cli(argc, argv, std::cout, std::cerr);
}
