#include <iostream>

#include "fracopt/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return fracopt::run(args, std::cout, std::cerr);
}
