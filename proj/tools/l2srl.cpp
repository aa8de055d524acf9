#include <iostream>
#include <string>
#include <vector>

#include "l2srl/pipeline.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return l2srl::run_cli(args, std::cout, std::cerr);
}
