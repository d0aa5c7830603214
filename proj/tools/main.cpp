#include "lshawkes/cli.hpp"

int main(int argc, char** argv) {
    return lshawkes::cli_main(argc, argv);
}
