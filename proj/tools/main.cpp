#include "cli_app.hpp"

int main(int argc, char** argv) {
    return surprise::run_cli(argc, argv);
}
