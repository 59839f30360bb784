#include <iostream>
#include <string>
#include <vector>

#include "contractive/cli.hpp"

int main(int argc, char** argv) {
    std::vector<std::string> args(argv + 1, argv + argc);
    return contractive::cli::run(args, std::cout, std::cerr);
}
