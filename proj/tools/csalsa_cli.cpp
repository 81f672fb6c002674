#include <iostream>

#include "csalsa/cli.hpp"

int main(int argc, char** argv)
{
    return csalsa::cli::main({argv + 1, argv + argc}, std::cout, std::cerr);
}
