#pragma once

#include <ostream>

namespace mcig::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitConfig = 2;     // bad flags, config or precondition
inline constexpr int kExitDomain = 3;     // domain or numerical failure
inline constexpr int kExitAlgorithm = 4;  // inversion, clustering or check failure

/// Runs the `mcig` command line; returns the process exit code.
int run(int argc, const char *const *argv, std::ostream &out, std::ostream &err);

} // namespace mcig::cli
