#include "survkit/multistate.hpp"

#include <cmath>
#include <sstream>

namespace survkit {

namespace {

// Covariance block of the row-h increments: multinomial form
//   cov(dA_hj, dA_hl) = (delta_jl dN_hj - dN_hj dN_hl / Y_h) / Y_h^2
// completed with the diagonal entry dA_hh = -sum_j dA_hj.
Eigen::MatrixXd row_increment_covariance(const Eigen::MatrixXd& counts,
                                         double y, std::size_t h) {
  const auto k = static_cast<std::size_t>(counts.rows());
  Eigen::MatrixXd c = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(k),
                                            static_cast<Eigen::Index>(k));
  for (std::size_t j = 0; j < k; ++j) {
    if (j == h) continue;
    const double dnj = counts(static_cast<Eigen::Index>(h),
                              static_cast<Eigen::Index>(j));
    for (std::size_t l = 0; l < k; ++l) {
      if (l == h) continue;
      const double dnl = counts(static_cast<Eigen::Index>(h),
                                static_cast<Eigen::Index>(l));
      double value = -dnj * dnl / (y * y * y);
      if (j == l) value += dnj / (y * y);
      c(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(l)) = value;
    }
  }
  // Entries involving the diagonal increment follow from the row-sum-zero
  // constraint.
  for (std::size_t j = 0; j < k; ++j) {
    if (j == h) continue;
    double sum = 0.0;
    for (std::size_t l = 0; l < k; ++l) {
      if (l == h) continue;
      sum += c(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(l));
    }
    c(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(h)) = -sum;
    c(static_cast<Eigen::Index>(h), static_cast<Eigen::Index>(j)) = -sum;
  }
  double total = 0.0;
  for (std::size_t j = 0; j < k; ++j) {
    if (j == h) continue;
    total -= c(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(h));
  }
  c(static_cast<Eigen::Index>(h), static_cast<Eigen::Index>(h)) = total;
  return c;
}

}  // namespace

Eigen::MatrixXd IntensityMatrixPath::increment(std::size_t i) const {
  const auto k = static_cast<Eigen::Index>(states.size());
  Eigen::MatrixXd da = Eigen::MatrixXd::Zero(k, k);
  for (Eigen::Index h = 0; h < k; ++h) {
    double row_sum = 0.0;
    const double y = at_risk[i](h);
    for (Eigen::Index j = 0; j < k; ++j) {
      if (j == h) continue;
      const double dn = counts[i](h, j);
      if (dn > 0) {
        const double jump = dn / y;
        da(h, j) = jump;
        row_sum += jump;
      }
    }
    da(h, h) = -row_sum;
  }
  return da;
}

StepFunction IntensityMatrixPath::cumulative(std::size_t from,
                                             std::size_t to) const {
  std::vector<double> jump_times, values;
  double a = 0.0;
  for (std::size_t i = 0; i < times.size(); ++i) {
    const double dn = counts[i](static_cast<Eigen::Index>(from),
                                static_cast<Eigen::Index>(to));
    if (dn == 0) continue;
    a += dn / at_risk[i](static_cast<Eigen::Index>(from));
    jump_times.push_back(times[i]);
    values.push_back(a);
  }
  return StepFunction(0.0, std::move(jump_times), std::move(values));
}

IntensityMatrixPath cumulative_intensity_matrix(const CountingPanel& panel) {
  const auto k = static_cast<Eigen::Index>(panel.states().size());
  IntensityMatrixPath path;
  path.states = panel.states();
  path.times = panel.times();
  path.counts.reserve(path.times.size());
  path.at_risk.reserve(path.times.size());
  for (std::size_t t = 0; t < path.times.size(); ++t) {
    Eigen::MatrixXd counts = Eigen::MatrixXd::Zero(k, k);
    Eigen::VectorXd y(k);
    for (Eigen::Index h = 0; h < k; ++h) {
      y(h) = static_cast<double>(
          panel.at_risk(t, static_cast<std::size_t>(h)));
      for (Eigen::Index j = 0; j < k; ++j) {
        if (j == h) continue;
        counts(h, j) = static_cast<double>(panel.increments(
            t, static_cast<std::size_t>(h), static_cast<std::size_t>(j)));
      }
    }
    path.counts.push_back(std::move(counts));
    path.at_risk.push_back(std::move(y));
  }
  return path;
}

Eigen::MatrixXd TransitionMatrixPath::at(double t) const {
  const auto k = static_cast<Eigen::Index>(states.size());
  auto it = std::upper_bound(times.begin(), times.end(), t);
  if (it == times.begin()) return Eigen::MatrixXd::Identity(k, k);
  return matrices[static_cast<std::size_t>(it - times.begin()) - 1];
}

Eigen::MatrixXd TransitionMatrixPath::covariance_at(double t) const {
  const auto k = static_cast<Eigen::Index>(states.size());
  auto it = std::upper_bound(times.begin(), times.end(), t);
  if (it == times.begin() || covariances.empty()) {
    return Eigen::MatrixXd::Zero(k * k, k * k);
  }
  return covariances[static_cast<std::size_t>(it - times.begin()) - 1];
}

TransitionMatrixPath aalen_johansen(const IntensityMatrixPath& intensities,
                                    double s, double t, bool with_covariance) {
  if (!(s <= t)) {
    throw Error(ErrorCode::invalid_argument,
                "aalen_johansen requires s <= t");
  }
  const auto k = static_cast<Eigen::Index>(intensities.states.size());

  TransitionMatrixPath path;
  path.states = intensities.states;
  path.start = s;

  Eigen::MatrixXd p = Eigen::MatrixXd::Identity(k, k);
  Eigen::MatrixXd cov;
  if (with_covariance) cov = Eigen::MatrixXd::Zero(k * k, k * k);

  for (std::size_t i = 0; i < intensities.times.size(); ++i) {
    const double u = intensities.times[i];
    if (!(u > s)) continue;
    if (u > t) break;

    const Eigen::MatrixXd da = intensities.increment(i);
    for (Eigen::Index h = 0; h < k; ++h) {
      if (1.0 + da(h, h) < 0.0) {
        std::ostringstream os;
        os << "negative diagonal factor 1 + dA(" << h << "," << h << ") = "
           << 1.0 + da(h, h) << " at time " << u;
        throw Error(ErrorCode::negative_diagonal, os.str());
      }
    }
    const Eigen::MatrixXd factor = Eigen::MatrixXd::Identity(k, k) + da;

    if (with_covariance) {
      // Transport the accumulated covariance through the new factor:
      // vec(X F) = T vec(X) with T[(c k + r),(b k + r)] = F(b, c).
      Eigen::MatrixXd transport = Eigen::MatrixXd::Zero(k * k, k * k);
      for (Eigen::Index c = 0; c < k; ++c) {
        for (Eigen::Index b = 0; b < k; ++b) {
          for (Eigen::Index r = 0; r < k; ++r) {
            transport(c * k + r, b * k + r) = factor(b, c);
          }
        }
      }
      cov = transport * cov * transport.transpose();

      // Increment contribution (I (x) L) B (I (x) L)': entry
      // [(c k + r),(c' k + r')] = sum_h L(r,h) L(r',h) c_h(c,c').
      for (Eigen::Index h = 0; h < k; ++h) {
        const double dn_total = intensities.counts[i].row(h).sum();
        if (dn_total <= 0) continue;
        const double y = intensities.at_risk[i](h);
        if (!(y > 0)) {
          throw Error(ErrorCode::risk_set_empty,
                      "transitions out of an empty risk set");
        }
        const Eigen::MatrixXd ch = row_increment_covariance(
            intensities.counts[i], y, static_cast<std::size_t>(h));
        const Eigen::VectorXd lh = p.col(h);
        const Eigen::MatrixXd w = lh * lh.transpose();
        for (Eigen::Index c = 0; c < k; ++c) {
          for (Eigen::Index c2 = 0; c2 < k; ++c2) {
            if (ch(c, c2) == 0.0) continue;
            cov.block(c * k, c2 * k, k, k) += ch(c, c2) * w;
          }
        }
      }
    }

    p = p * factor;
    path.times.push_back(u);
    path.matrices.push_back(p);
    if (with_covariance) path.covariances.push_back(cov);
  }
  return path;
}

Eigen::MatrixXd aj_covariance(const IntensityMatrixPath& intensities, double s,
                              double t) {
  const auto path = aalen_johansen(intensities, s, t, true);
  const auto k = static_cast<Eigen::Index>(intensities.states.size());
  if (path.covariances.empty()) return Eigen::MatrixXd::Zero(k * k, k * k);
  return path.covariances.back();
}

}  // namespace survkit
