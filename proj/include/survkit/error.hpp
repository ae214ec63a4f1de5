#pragma once

#include <stdexcept>
#include <string>

namespace survkit {

enum class ErrorCode {
  io,
  parse,
  validation,
  invalid_argument,
  empty_data,
  unknown_transition,
  not_survival_data,
  degenerate_variance,
  one_group_empty,
  singular_covariance,
  non_finite_input,
  singular_information,
  risk_set_empty,
  negative_diagonal,
  invalid_spec,
  empty_study,
};

// Single exception type for the whole library; the code tells callers (and
// the C boundary) which class of failure occurred.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(what), code_(code) {}
  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace survkit
