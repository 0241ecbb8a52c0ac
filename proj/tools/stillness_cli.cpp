#include <iostream>
#include <string>
#include <vector>

#include "stillness/cli.hpp"

int main(int argc, char** argv) {
    std::vector<std::string> args(argv + 1, argv + argc);
    return stillness::run_cli(args, std::cout, std::cerr);
}
