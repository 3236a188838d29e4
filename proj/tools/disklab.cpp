#include <iostream>
#include <string>
#include <vector>

#include "disklab/cli.hpp"

int main(int argc, char** argv) {
    std::vector<std::string> args(argv + 1, argv + argc);
    return disklab::run(args, std::cout, std::cerr);
}
