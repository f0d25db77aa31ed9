#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace delaygrad {

// Full command-line entry point. Returns the process exit code:
// 0 success, 1 usage/validation/precondition error, 2 internal error.
// Output goes to --out when given, otherwise to `out`.
int run_cli(const std::vector<std::string>& args, std::ostream& out,
            std::ostream& err);

}  // namespace delaygrad
