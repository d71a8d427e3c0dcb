#include <iostream>
#include <string>
#include <vector>

#include "morphwing/cli.hpp"

int main(int argc, char** argv) {
    std::vector<std::string> args(argv, argv + argc);
    return morphwing::cli::run(args, std::cout, std::cerr);
}
