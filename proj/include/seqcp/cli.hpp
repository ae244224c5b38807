#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace seqcp {

/// Exit codes: 0 success, 1 usage error, 2 data error.
inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 1;
inline constexpr int kExitData = 2;

/// Entry point behind the `seqcp` executable. `args` excludes argv[0].
int run_cli(const std::vector<std::string>& args, std::ostream& out,
            std::ostream& err);

}  // namespace seqcp
