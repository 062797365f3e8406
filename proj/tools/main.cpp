#include "exclusion/harness.hpp"

int main(int argc, char** argv) {
    return exclusion::cli_main(argc, argv);
}
