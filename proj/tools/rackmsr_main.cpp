#include "rackmsr/cli.hpp"

int main(int argc, char** argv) {
    return rackmsr::cli::run({argv + 1, argv + argc});
}
