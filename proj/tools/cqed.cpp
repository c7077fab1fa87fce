#include <iostream>

#include "cqed/cli/run.hpp"

int main(int argc, char** argv) {
    return cqed::cli::run_cli(argc, argv, std::cout, std::cerr);
}
