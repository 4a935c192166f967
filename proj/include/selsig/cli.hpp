#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace selsig {

// Exit codes: 0 success, 2 usage error, 3 failed check, 4 resource limit.
inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 2;
inline constexpr int kExitCheckFailed = 3;
inline constexpr int kExitResourceLimit = 4;

// Batch command surface; `args` excludes the program name. All output goes
// to `out` (reports, tables) and `err` (usage and error messages).
int cli_run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace selsig
