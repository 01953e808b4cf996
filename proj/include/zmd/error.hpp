#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace zmd {

enum class ErrorCode {
  invalid_argument,
  dimension_mismatch,
  invalid_platform,
  invalid_tilt_pattern,
  no_zero_moment_direction,
  near_singular_allocation,
  thrust_singularity,
  controller_fault,
  integration_diverged,
  config_error,
};

std::string_view to_string(ErrorCode code);

/// Single exception type for the library; the code tells callers which
/// contract was broken.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace zmd
