#pragma once

#include <iosfwd>
#include <span>
#include <string>

namespace epp::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 1;
inline constexpr int kExitFailure = 2;

/// Entry point of the `epp` tool; `args` excludes the program name.
int run(std::span<const std::string> args, std::ostream& out, std::ostream& err);

} // namespace epp::cli
