#include <iostream>

#include "apharm/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return apharm::cli::run_command(args, std::cout, std::cerr);
}
