#include <iostream>
#include <string>
#include <vector>

#include "idsfx/cli.hpp"

int main(int argc, char** argv) {
    std::vector<std::string> args(argv + 1, argv + argc);
    return idsfx::run_cli(args, std::cout, std::cerr);
}
