#include "cli.hpp"

int main(int argc, char** argv) { return edgegap::cli::run(argc, argv); }
