#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace iwil::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitConfig = 2;
inline constexpr int kExitIo = 3;
inline constexpr int kExitShape = 4;

/// Runs one command line (args excludes the program name) and returns the
/// process exit code. Never throws.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace iwil::cli
