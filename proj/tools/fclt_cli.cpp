#include "fclt/cli.hpp"

#include <iostream>

int main(int argc, char** argv)
{
    return fclt::run_cli(argc, argv, std::cout, std::cerr);
}
