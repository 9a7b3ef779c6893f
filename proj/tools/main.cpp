#include <iostream>
#include <string>
#include <vector>

#include "ulab/harness.hpp"

int main(int argc, char** argv)
{
    std::vector<std::string> args(argv + 1, argv + argc);
    return ulab::harness::run_cli(args, std::cout, std::cerr);
}
