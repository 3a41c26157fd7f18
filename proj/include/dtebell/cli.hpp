#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace dtebell {

inline constexpr int kExitSuccess = 0;
inline constexpr int kExitRuntime = 1;
inline constexpr int kExitConfig = 2;

// Runs the command line `args` (without the program name). Tables go to
// `out`, diagnostics and summaries to `err`. Returns the process exit code:
// 0 success, 1 runtime or quadrature failure, 2 configuration or usage error.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace dtebell
