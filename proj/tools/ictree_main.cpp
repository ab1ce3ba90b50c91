#include "ictree/cli.hpp"

int main(int argc, char** argv) { return ictree::cli::run(argc, argv); }
