#include <iostream>
#include <string>
#include <vector>

#include "mginf/commands.hpp"

int main(int argc, char** argv) {
    std::vector<std::string> args(argv + 1, argv + argc);
    return mginf::run_command_line(args, std::cout, std::cerr);
}
