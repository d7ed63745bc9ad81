#include "stabkit_cli/commands.hpp"

#include <iostream>

int main(int argc, char** argv) {
  std::vector<std::string> args(argv, argv + argc);
  return stabkit::cli::run_cli(args, std::cout, std::cerr);
}
