#include <pamsvm/cli.hpp>

#include <iostream>

int main(int argc, char** argv)
{
    return pamsvm::run_cli(argc, argv, std::cout, std::cerr);
}
