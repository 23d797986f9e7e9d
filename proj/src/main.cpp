#include <iostream>

#include "leanopt/cli.hpp"

int main(int argc, char** argv) {
    return leanopt::run_cli({argv + 1, argv + argc}, std::cout, std::cerr);
}
