#include <iostream>

#include "gazeaffect/cli.hpp"

int main(int argc, char** argv) {
    std::vector<std::string> args(argv + 1, argv + argc);
    return gazeaffect::cli::run_cli(args, std::cout, std::cerr);
}
