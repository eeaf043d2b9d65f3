#pragma once

#include <iosfwd>

namespace heatwave {

inline constexpr int kExitOk = 0;
inline constexpr int kExitCheckFailed = 1;
inline constexpr int kExitUsage = 2;

/// Entry point of the heatwave executable. Messages go to out and err.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

} // namespace heatwave
