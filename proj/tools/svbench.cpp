#include <unistd.h>

#include <cstdlib>
#include <iostream>

#include "svbench/cli.hpp"

int main(int argc, char** argv) {
  svbench::cli::Console console{std::cout, std::cerr, isatty(STDOUT_FILENO) && !std::getenv("NO_COLOR")};
  return svbench::cli::run_cli(argc, argv, console);
}
