#include <iostream>
#include <string>
#include <vector>

#include "branchhist/cli.hpp"

int main(int argc, char** argv) {
    std::vector<std::string> args(argv + (argc > 0 ? 1 : 0), argv + argc);
    return branchhist::run_cli(args, std::cout, std::cerr);
}
