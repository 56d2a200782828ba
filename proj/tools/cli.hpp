#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace sheetaudit::cli {

enum ExitCode : int {
  kExitPass = 0,
  kExitMismatch = 1,  // validate failed, or audit found culprits
  kExitError = 2,     // usage, unreadable input, bad spec
};

// `args` excludes the program name. `out_is_terminal` picks the default
// --format (text on a terminal, json otherwise).
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err,
            bool out_is_terminal = false);

}  // namespace sheetaudit::cli
