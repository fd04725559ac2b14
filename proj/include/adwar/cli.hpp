#pragma once

// The `adwar` command line. Kept in the library so tests can drive it
// without spawning a process.

#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

namespace adwar {

inline constexpr int kExitOk = 0;
inline constexpr int kExitFailure = 1;  // validation or verification failed
inline constexpr int kExitUsage = 2;

/// `args` excludes the program name. Reports go to `out`, diagnostics to `err`.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

/// Files named directly plus the `ext` files of named directories, sorted by
/// path. Report files (*.report.json) are skipped.
std::vector<std::string> expand_inputs(const std::vector<std::string>& paths, std::string_view ext = ".json");

}  // namespace adwar
