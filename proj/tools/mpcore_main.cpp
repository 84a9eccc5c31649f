#include <iostream>
#include <string>
#include <vector>

#include "mpcore/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return mpcore::run_cli(args, std::cout, std::cerr);
}
