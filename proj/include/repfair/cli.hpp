#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace repfair {

enum ExitCode : int { kExitOk = 0, kExitFails = 1, kExitInputError = 2, kExitBudget = 3 };

/// Entry point of the `repfair` tool. args[0] is the program name.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace repfair
