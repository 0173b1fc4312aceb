#include "specrank/cli.hpp"

int main(int argc, char** argv) { return specrank::cli::run(argc, argv); }
