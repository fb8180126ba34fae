#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace qmod::cli {

// exit codes: 0 ok, 2 invalid spec/arguments, 3 certified target
// unreachable, 4 cusp-finite spec where a polar part is required
inline constexpr int kExitOk = 0;
inline constexpr int kExitBadSpec = 2;
inline constexpr int kExitUnreachable = 3;
inline constexpr int kExitCuspFinite = 4;

// Runs the command line (without the program name) writing to the given
// streams; returns the exit code.  The same entry point backs the main()
// binary and the test harness.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace qmod::cli
