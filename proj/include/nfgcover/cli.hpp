#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace nfgcover {

/// Exit codes: 0 success, 1 a verification check failed, 2 usage or input
/// error.
inline constexpr int kExitOk = 0;
inline constexpr int kExitVerificationFailed = 1;
inline constexpr int kExitUsage = 2;

/// Runs one CLI invocation; args excludes the program name. "check NAME" is
/// accepted as an alias of "check-NAME".
int run_cli(std::vector<std::string> args, std::ostream& out, std::ostream& err);

}  // namespace nfgcover
