#pragma once

#include <iosfwd>

namespace cera {

/// Exit codes shared by every subcommand.
enum ExitCode : int { kExitOk = 0, kExitUsage = 2, kExitCapacity = 3, kExitParse = 4 };

/// Entry point of the `cera` tool; subcommands analyze, simulate, inspect-chain,
/// thresholds and reproduce. CSV goes to `out` unless --out DIR is given.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace cera
