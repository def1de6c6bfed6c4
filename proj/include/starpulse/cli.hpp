#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace starpulse::cli {

/// Exit codes of `run`.
enum ExitCode : int { kOk = 0, kVerificationFailed = 1, kConfigError = 2, kNumericalError = 3 };

/// Cache schema version; bumping it invalidates every stored artifact.
inline constexpr const char* kCacheSchema = "starpulse-modes-1";

/// Entry point of the command line. `args` excludes the program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);
int run(int argc, char** argv);

}  // namespace starpulse::cli
