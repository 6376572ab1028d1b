#ifndef WELFARE_CLI_HPP_
#define WELFARE_CLI_HPP_

#include <ostream>
#include <string>
#include <vector>

namespace welfare::cli {

enum ExitCode : int {
  kOk = 0,
  kValidationError = 1,
  kRuntimeFailure = 2,
  kViolations = 3,
};

/// Runs one invocation: gen, train, fairify, weights, allocate, compare or
/// check. Human-readable summaries go to `out`; diagnostics to `err`, prefixed
/// "error:", "warning:" or "violation:".
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace welfare::cli

#endif  // WELFARE_CLI_HPP_
