#include <iostream>

#include "fixedprice/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  auto result = fixedprice::run_cli(args);
  std::cout << result.out;
  std::cerr << result.err;
  return result.exit_code;
}
