#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace fabflow::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitValidation = 1;
inline constexpr int kExitInfeasible = 2;

/// Runs one `fabflow` invocation. `args` excludes the program name. The
/// key=value summary goes to `out`, diagnostics to `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace fabflow::cli
