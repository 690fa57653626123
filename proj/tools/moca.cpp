#include <cstdlib>
#include <iostream>
#include <string>
#include <vector>

#include "moca/cli.hpp"

int main(int argc, char** argv) {
    std::vector<std::string> args(argv + 1, argv + argc);
    const char* env = std::getenv("MOCA_KB_PATH");
    return moca::cli::run(args, std::cout, std::cerr, env ? env : "");
}
