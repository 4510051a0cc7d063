#include <iostream>

#include "shortkit/cli.hpp"

int main(int argc, char** argv) {
    std::vector<std::string> args(argv, argv + argc);
    return shortkit::run_cli(args, std::cout, std::cerr);
}
