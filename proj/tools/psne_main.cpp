#include "psne/commands.hpp"

int main(int argc, char** argv) {
    return psne::cli::run(argc, argv);
}
