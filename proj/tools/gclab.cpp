#include <iostream>

#include "gcl/cli.hpp"

int main(int argc, char** argv)
{
    return gcl::main_entry(argc, argv, std::cout, std::cerr);
}
