#include "wigflow/cli.hpp"

int main(int argc, char** argv) { return wigflow::cli::run(argc, argv); }
