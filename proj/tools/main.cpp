#include <iostream>

#include "mechlab/cli.hpp"

int main(int argc, char** argv) {
    std::vector<std::string> args(argv + 1, argv + argc);
    return mechlab::run(args, std::cout, std::cerr);
}
