#pragma once

#include <string>
#include <vector>

namespace fixedprice {

struct CliResult {
  int exit_code = 0;  // 0 success, 2 failed check, 1 error or usage
  std::string out;
  std::string err;
};

// Runs one command; args excludes the program name.
CliResult run_cli(const std::vector<std::string>& args);

}  // namespace fixedprice
