#pragma once

#include <iosfwd>

namespace iwt::cli {

// Exit codes.
inline constexpr int kOk = 0;
inline constexpr int kUsage = 1;
inline constexpr int kMismatch = 2;
inline constexpr int kOverflow = 3;

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace iwt::cli
