#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace geoscout {

// Exit codes.
inline constexpr int kExitOk = 0;
inline constexpr int kExitFailure = 1;
inline constexpr int kExitConfig = 2;
inline constexpr int kExitSources = 3;
inline constexpr int kExitMismatch = 4;

// args[0] is the program name.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace geoscout
