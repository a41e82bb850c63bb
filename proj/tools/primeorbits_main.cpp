#include <iostream>

#include "primeorbits/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return primeorbits::run_cli(args, std::cout, std::cerr).exit_code;
}
