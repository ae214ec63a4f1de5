#pragma once

#include <Eigen/Core>
#include <cstddef>
#include <string>
#include <vector>

#include "survkit/event_data.hpp"
#include "survkit/step_function.hpp"

namespace survkit {

// Matrix of Nelson-Aalen increments per event time, pooled over groups.
// counts[i](h,j) is dN_hj at times[i]; at_risk[i](h) is Y_h just before.
struct IntensityMatrixPath {
  std::vector<std::string> states;
  std::vector<double> times;
  std::vector<Eigen::MatrixXd> counts;
  std::vector<Eigen::VectorXd> at_risk;

  // Increment matrix dA(u): off-diagonal dN_hj/Y_h, diagonal the negated row
  // sum, so every row sums to zero.
  Eigen::MatrixXd increment(std::size_t i) const;
  // Cumulative hazard path A_hj for one transition.
  StepFunction cumulative(std::size_t from, std::size_t to) const;
};

IntensityMatrixPath cumulative_intensity_matrix(const CountingPanel& panel);

// Empirical transition matrices P(s, u) for every event time u in (s, t],
// accumulated left to right as a product of factors I + dA(u). Covariances
// (when requested) are for the column-major vec of P(s, u).
struct TransitionMatrixPath {
  std::vector<std::string> states;
  double start = 0.0;
  std::vector<double> times;
  std::vector<Eigen::MatrixXd> matrices;
  std::vector<Eigen::MatrixXd> covariances;  // empty unless requested

  Eigen::MatrixXd at(double t) const;             // identity before first time
  Eigen::MatrixXd covariance_at(double t) const;  // zero before first time
};

TransitionMatrixPath aalen_johansen(const IntensityMatrixPath& intensities,
                                    double s, double t,
                                    bool with_covariance = false);

// Final-time covariance of vec(P(s,t)): the matrix Duhamel representation
// with the multinomial increment covariance plugged in,
//   cov(dA_hj, dA_hl) = (delta_jl * dN_hj - dN_hj dN_hl / Y_h) / Y_h^2,
// which reduces to the Greenwood survival variance on two-state data.
Eigen::MatrixXd aj_covariance(const IntensityMatrixPath& intensities, double s,
                              double t);

}  // namespace survkit
