// cfgsimple - command-line front end.
#include <iostream>

#include "cfgsimple/cli.hpp"

int main(int argc, char** argv) { return cfgsimple::cli::run(argc, argv, std::cout, std::cerr); }
