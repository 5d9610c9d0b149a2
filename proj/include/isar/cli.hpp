#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace isar::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitRuntime = 1;
inline constexpr int kExitUsage = 2;

/// Entry point shared by the `isar` binary and the tests. `args` excludes the
/// program name. Machine-readable results go to `out`, progress and errors to `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace isar::cli
