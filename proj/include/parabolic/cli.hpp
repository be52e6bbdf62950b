#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace parabolic::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitContradiction = 1;
inline constexpr int kExitConfig = 2;

/// Subcommand dispatch; args excludes the program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace parabolic::cli
