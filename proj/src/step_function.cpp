#include "survkit/step_function.hpp"

#include <algorithm>
#include <utility>

#include "survkit/error.hpp"

namespace survkit {

StepFunction::StepFunction(double origin, std::vector<double> times,
                           std::vector<double> values)
    : origin_(origin), times_(std::move(times)), values_(std::move(values)) {
  if (times_.size() != values_.size()) {
    throw Error(ErrorCode::invalid_argument,
                "step function: times and values differ in length");
  }
  for (std::size_t i = 1; i < times_.size(); ++i) {
    if (!(times_[i] > times_[i - 1])) {
      throw Error(ErrorCode::invalid_argument,
                  "step function: jump times must be strictly increasing");
    }
  }
}

double StepFunction::operator()(double t) const {
  auto it = std::upper_bound(times_.begin(), times_.end(), t);
  if (it == times_.begin()) return origin_;
  return values_[static_cast<std::size_t>(it - times_.begin()) - 1];
}

double StepFunction::left_limit(double t) const {
  auto it = std::lower_bound(times_.begin(), times_.end(), t);
  if (it == times_.begin()) return origin_;
  return values_[static_cast<std::size_t>(it - times_.begin()) - 1];
}

double StepFunction::final_value() const {
  return values_.empty() ? origin_ : values_.back();
}

}  // namespace survkit
