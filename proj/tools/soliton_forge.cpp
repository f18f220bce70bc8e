#include <iostream>
#include <string>
#include <vector>

#include "soliton_forge/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv, argv + argc);
  return sforge::run_cli(args, std::cout, std::cerr);
}
