#include <iostream>

#include "mmd/cli.hpp"

int main(int argc, char** argv) {
    return mmd::cli_main(argc, argv, std::cout, std::cerr);
}
