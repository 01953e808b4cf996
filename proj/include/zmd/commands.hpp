#pragma once

#include <cstdint>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

namespace zmd {

inline constexpr int kExitOk = 0;
inline constexpr int kExitFailed = 1;  // assumption violated or simulation aborted
inline constexpr int kExitBadInput = 2;

/// Prints the allocation analysis of a platform file. Exit 0 iff rk(M F_bar) = 3
/// (1 if not, 2 if the file cannot be parsed).
int cmd_validate(const std::string& platform_file, std::ostream& out, std::ostream& err);

struct RunOptions {
  std::vector<std::string> scenario_files;
  std::optional<std::string> output;  // only with a single scenario
  std::optional<std::uint64_t> seed;
  int jobs = 1;
};

/// Runs each scenario, writes its CSV trace and prints a summary block.
int cmd_run(const RunOptions& options, std::ostream& out, std::ostream& err);

}  // namespace zmd
