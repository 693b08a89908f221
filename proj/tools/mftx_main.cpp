#include <iostream>

#include "mftx/harness.hpp"

int main(int argc, char** argv) {
    return mftx::harness::run_cli({argv, argv + argc}, std::cout, std::cerr);
}
