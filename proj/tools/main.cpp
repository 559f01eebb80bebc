#include "cli.hpp"

#include <iostream>

int main(int argc, char ** argv)
{
    return phylo::run_cli(argc, argv, std::cout, std::cerr);
}
