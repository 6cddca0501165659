#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace sosim {

inline constexpr int kExitOk = 0;
inline constexpr int kExitDataError = 1;
inline constexpr int kExitUsage = 2;

/// Entry point of the `sosim` tool. `args` excludes the program name.
/// Returns 0 on success, 1 on input/data errors, 2 on usage errors.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace sosim
