#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace pgreen::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitRejected = 1;
inline constexpr int kExitNonConvergence = 2;
inline constexpr int kExitConsistency = 3;
inline constexpr int kExitUsage = 64;

/// Parses argv and runs one subcommand. Summaries go to `out`, diagnostics
/// to `err`.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

struct SelftestLine {
  std::string name;
  bool passed;
  std::string detail;
};

/// Property suite over random small graphs and closed-form cases.
std::vector<SelftestLine> run_selftest(unsigned long long seed, int samples);

}  // namespace pgreen::cli
