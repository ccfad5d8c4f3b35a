#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace jointdesc::cli {

// Exit codes shared by every subcommand.
inline constexpr int kExitOk = 0;
inline constexpr int kExitInternal = 1;  // internal error or search budget exhausted
inline constexpr int kExitUsage = 2;     // invalid input
inline constexpr int kExitFinding = 3;   // infeasible / inconsistent / violation found

// Runs one command line (args excludes the program name). Reports go to out
// unless --out is given; diagnostics go to err.
int dispatch(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace jointdesc::cli
