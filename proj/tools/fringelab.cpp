#include <fringelab/cli.hpp>

int main(int argc, char **argv) { return fringelab::cli::run_cli(argc, argv); }
