#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace moca::cli {

/// Stable exit codes.
inline constexpr int kExitOk = 0;
inline constexpr int kExitValidation = 1;
inline constexpr int kExitUsage = 2;

/// Entry point shared by the `moca` binary and the tests. `args` excludes
/// the program name. `kb_env` stands in for MOCA_KB_PATH (colon-separated).
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err,
        const std::string& kb_env = {});

}  // namespace moca::cli
