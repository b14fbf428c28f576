#include <iostream>
#include <string>
#include <vector>

#include "retro/app/cli.hpp"

int main(int argc, char** argv) {
    return retro::cli::run(std::vector<std::string>(argv + 1, argv + argc), std::cout, std::cerr);
}
