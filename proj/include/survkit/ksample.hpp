#pragma once

#include <Eigen/Core>
#include <string>
#include <string_view>
#include <vector>

#include "survkit/event_data.hpp"

namespace survkit {

enum class WeightFamily { logrank, gehan, tarone_ware, peto_peto };

WeightFamily weight_family_from_string(std::string_view name);
std::string_view to_string(WeightFamily family);

// Shared weight W(s) per event time, with the two-sample integrand
// L(s) = W(s) * Y1 Y2 / Y when the panel has exactly two groups. All weights
// are predictable: they depend on Y(s) and strictly prior data only
// (peto-peto uses the left limit of the pooled Kaplan-Meier).
struct WeightTableRow {
  double time = 0.0;
  double pooled_at_risk = 0.0;
  double weight = 0.0;        // W(s)
  double two_sample_l = 0.0;  // NaN when the panel is not two-group
};

std::vector<WeightTableRow> weight_table(const CountingPanel& panel,
                                         WeightFamily family);

struct KSampleResult {
  std::vector<std::string> groups;
  WeightFamily weights = WeightFamily::logrank;
  Eigen::VectorXd statistic;   // first k-1 components of X_j(horizon)
  Eigen::MatrixXd covariance;  // (k-1) x (k-1)
  double chi_square = 0.0;
  int df = 0;  // rank of the covariance
  double p_value = 1.0;
  bool singular = false;
};

// Weighted k-sample comparison of the group-specific rates of the panel's
// single transition type: X_j = sum_s W(s) (dN_j - Y_j dN / Y) with the
// hypergeometric tie-corrected variance. Singular covariances fall back to a
// generalized inverse with df = rank.
KSampleResult k_sample_test(const CountingPanel& panel, WeightFamily weights,
                            double horizon);
KSampleResult two_sample_test(const CountingPanel& panel, WeightFamily weights,
                              double horizon);

}  // namespace survkit
