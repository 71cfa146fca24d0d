#include <string>
#include <vector>

#include "gapestim/cli.hpp"

int main(int argc, char** argv) {
    std::vector<std::string> args(argv + 1, argv + argc);
    return gapestim::cli_main(std::move(args));
}
