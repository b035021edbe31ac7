#include "cli.hpp"

int main(int argc, char** argv) { return wbary::cli::run_cli(argc, argv); }
