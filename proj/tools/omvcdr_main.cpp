#include <iostream>

#include "omvcdr/cli.hpp"

int main(int argc, char** argv) {
    std::vector<std::string> args(argv + 1, argv + argc);
    return omvcdr::cli::run(args, std::cout, std::cerr);
}
