#include <iostream>
#include <string>
#include <vector>

#include "medliab/cli.hpp"

int main(int argc, char** argv) {
    std::vector<std::string> args(argv + 1, argv + argc);
    return medliab::cli::dispatch(args, std::cout, std::cerr);
}
