#include <iostream>
#include <string>
#include <vector>

#include "curvlab/run.hpp"

int main(int argc, char** argv) {
    std::vector<std::string> args(argv + 1, argv + argc);
    return curvlab::run(args, std::cout);
}
