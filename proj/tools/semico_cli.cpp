#include <iostream>
#include <string>
#include <vector>

#include "semico/cli.hpp"

int main(int argc, char** argv)
{
    std::vector<std::string> args(argv, argv + argc);
    return semico::run_cli(args, std::cout, std::cerr);
}
