#include "hitr/cli.hpp"

int main(int argc, char** argv) {
    return hitr::run_cli(argc, argv);
}
