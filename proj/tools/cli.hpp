#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace cms::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitInternal = 1;
inline constexpr int kExitUsage = 2;

// Entry point of `cmsctl`. args[0] is the program name. Subcommands:
// dimension, gen-trace, run, bench.
int run_cli(const std::vector<std::string>& args, std::ostream& out,
            std::ostream& err);

}  // namespace cms::cli
