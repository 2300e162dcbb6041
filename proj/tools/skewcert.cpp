#include <iostream>

#include "skewcert/cli.hpp"

int main(int argc, char** argv) {
    std::vector<std::string> args(argv + 1, argv + argc);
    return skewcert::run_cli(args, std::cout, std::cerr);
}
