#pragma once

#include <cstddef>
#include <vector>

namespace survkit {

// Right-continuous piecewise-constant path with left limits. values[i] is the
// value at and after times[i]; origin is the value on [0, times[0]).
class StepFunction {
 public:
  StepFunction() = default;
  StepFunction(double origin, std::vector<double> times,
               std::vector<double> values);

  double origin() const noexcept { return origin_; }
  const std::vector<double>& times() const noexcept { return times_; }
  const std::vector<double>& values() const noexcept { return values_; }
  std::size_t size() const noexcept { return times_.size(); }
  bool empty() const noexcept { return times_.empty(); }

  // Value of the last jump at or before t.
  double operator()(double t) const;
  // Value just before t.
  double left_limit(double t) const;
  // Value after the last jump (origin if there is none).
  double final_value() const;

 private:
  double origin_ = 0.0;
  std::vector<double> times_;
  std::vector<double> values_;
};

}  // namespace survkit
