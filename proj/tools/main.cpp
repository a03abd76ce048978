#include "juris/cli.hpp"

int main(int argc, char** argv) {
    return juris::cli::dispatch(argc, argv);
}
