#include <vector>

#include "pjd/cli.hpp"

int main(int argc, char** argv) {
    std::vector<std::string> args(argv + 1, argv + argc);
    return pjd::cli::run(args);
}
