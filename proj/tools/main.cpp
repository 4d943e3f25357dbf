#include "cli.hpp"

int main(int argc, char** argv) { return kgds::cli::run(argc, argv); }
