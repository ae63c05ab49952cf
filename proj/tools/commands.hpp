#pragma once

#include <iosfwd>

namespace twinrec::cli {

inline constexpr const char* kVersion = "0.1.0";

/// Exit codes: 0 success (or recoverable), 1 input error, 2 not recoverable or a failed reproduction check.
int run(int argc, char** argv, std::ostream& out, std::ostream& err);

}  // namespace twinrec::cli
