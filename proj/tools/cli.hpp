#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace robustrank::cli {

enum ExitCode : int {
  ok = 0,
  invalid_config = 1,
  unreadable_input = 2,
  solver_failure = 3,
  infeasible = 4,
};

// Runs one command; `args` excludes the program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace robustrank::cli
