#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace alsvm {

inline constexpr const char* kVersion = "alsvm 1.0.0";

/// Exit codes: 0 success, 1 runtime error, 2 usage error.
enum ExitCode : int { kExitOk = 0, kExitRuntime = 1, kExitUsage = 2 };

/// Entry point behind the `alsvm` binary. `args` excludes the program name.
/// Subcommands: samplesize, gen-synth, simulate, report.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace alsvm
