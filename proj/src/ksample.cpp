#include "survkit/ksample.hpp"

#include <Eigen/Dense>
#include <boost/math/distributions/chi_squared.hpp>
#include <cmath>
#include <limits>
#include <string>

namespace survkit {

WeightFamily weight_family_from_string(std::string_view name) {
  if (name == "logrank") return WeightFamily::logrank;
  if (name == "gehan") return WeightFamily::gehan;
  if (name == "tarone-ware") return WeightFamily::tarone_ware;
  if (name == "peto-peto") return WeightFamily::peto_peto;
  throw Error(ErrorCode::invalid_argument,
              "unknown weight family '" + std::string(name) + "'");
}

std::string_view to_string(WeightFamily family) {
  switch (family) {
    case WeightFamily::logrank: return "logrank";
    case WeightFamily::gehan: return "gehan";
    case WeightFamily::tarone_ware: return "tarone-ware";
    case WeightFamily::peto_peto: return "peto-peto";
  }
  return "logrank";
}

namespace {

struct TransitionRef {
  std::size_t from;
  std::size_t to;
};

TransitionRef single_transition(const CountingPanel& panel) {
  const auto types = panel.transition_types();
  if (types.size() != 1) {
    throw Error(ErrorCode::not_survival_data,
                "rate comparison needs a single transition type; panel has " +
                    std::to_string(types.size()));
  }
  return {types[0].first, types[0].second};
}

// W(s) for the family; pooled_km is the left limit of the pooled
// Kaplan-Meier, maintained by the caller as times are visited in order.
double family_weight(WeightFamily family, double pooled_y, double n,
                     double pooled_km_left) {
  switch (family) {
    case WeightFamily::logrank: return 1.0;
    case WeightFamily::gehan: return pooled_y / n;
    case WeightFamily::tarone_ware: return std::sqrt(pooled_y / n);
    case WeightFamily::peto_peto: return pooled_km_left;
  }
  return 1.0;
}

}  // namespace

std::vector<WeightTableRow> weight_table(const CountingPanel& panel,
                                         WeightFamily family) {
  const auto tr = single_transition(panel);
  const bool two_groups = panel.groups().size() == 2;
  const double n = static_cast<double>(panel.n_records());

  std::vector<WeightTableRow> rows;
  double pooled_km = 1.0;
  for (std::size_t t = 0; t < panel.times().size(); ++t) {
    const double y = static_cast<double>(panel.at_risk(t, tr.from));
    const double dn = static_cast<double>(panel.increments(t, tr.from, tr.to));
    WeightTableRow row;
    row.time = panel.times()[t];
    row.pooled_at_risk = y;
    row.weight = family_weight(family, y, n, pooled_km);
    row.two_sample_l = std::numeric_limits<double>::quiet_NaN();
    if (two_groups) {
      const double y1 = static_cast<double>(panel.at_risk(t, 0, tr.from));
      const double y2 = static_cast<double>(panel.at_risk(t, 1, tr.from));
      row.two_sample_l =
          (y1 == 0.0 || y2 == 0.0) ? 0.0 : row.weight * y1 * y2 / y;
    }
    rows.push_back(row);
    if (y > 0) pooled_km *= 1.0 - dn / y;
  }
  return rows;
}

KSampleResult k_sample_test(const CountingPanel& panel, WeightFamily weights,
                            double horizon) {
  const auto tr = single_transition(panel);
  const std::size_t k = panel.groups().size();
  if (k < 2) {
    throw Error(ErrorCode::one_group_empty,
                "k-sample test needs at least two groups");
  }
  for (std::size_t gi = 0; gi < k; ++gi) {
    bool any = false;
    for (std::size_t t = 0; t < panel.times().size() && !any; ++t) {
      any = panel.at_risk(t, gi, tr.from) > 0 ||
            panel.increments(t, gi, tr.from, tr.to) > 0;
    }
    if (!any) {
      throw Error(ErrorCode::one_group_empty,
                  "group '" + panel.groups()[gi] + "' has no subjects at risk");
    }
  }

  const auto dim = static_cast<Eigen::Index>(k - 1);
  Eigen::VectorXd u = Eigen::VectorXd::Zero(dim);
  Eigen::MatrixXd v = Eigen::MatrixXd::Zero(dim, dim);
  const double n = static_cast<double>(panel.n_records());

  double pooled_km = 1.0;
  std::vector<double> dn_g(k), y_g(k);
  for (std::size_t t = 0; t < panel.times().size(); ++t) {
    const double time = panel.times()[t];
    if (time > horizon) break;
    double dn = 0.0, y = 0.0;
    for (std::size_t gi = 0; gi < k; ++gi) {
      dn_g[gi] = static_cast<double>(panel.increments(t, gi, tr.from, tr.to));
      y_g[gi] = static_cast<double>(panel.at_risk(t, gi, tr.from));
      dn += dn_g[gi];
      y += y_g[gi];
    }
    const double w = family_weight(weights, y, n, pooled_km);
    if (y > 0) {
      // Observed minus expected, written over the common denominator so that
      // identical groups cancel exactly.
      for (Eigen::Index j = 0; j < dim; ++j) {
        double num = 0.0;
        for (std::size_t l = 0; l < k; ++l) {
          if (l == static_cast<std::size_t>(j)) continue;
          num += y_g[l] * dn_g[static_cast<std::size_t>(j)] -
                 y_g[static_cast<std::size_t>(j)] * dn_g[l];
        }
        u(j) += w * num / y;
      }
      if (y > 1 && dn > 0) {
        const double c = w * w * dn * (y - dn) / (y - 1.0);
        for (Eigen::Index j = 0; j < dim; ++j) {
          const double yj = y_g[static_cast<std::size_t>(j)];
          for (Eigen::Index l = 0; l <= j; ++l) {
            const double yl = y_g[static_cast<std::size_t>(l)];
            double term = -c * yj * yl / (y * y);
            if (j == l) term += c * yj / y;
            v(j, l) += term;
            if (j != l) v(l, j) += term;
          }
        }
      }
      pooled_km *= 1.0 - dn / y;
    }
  }

  KSampleResult result;
  result.groups = panel.groups();
  result.weights = weights;
  result.statistic = u;
  result.covariance = v;

  // Rank-revealing solve; a singular covariance falls back to the
  // generalized inverse with df = rank.
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eigen(v);
  const Eigen::VectorXd& lambda = eigen.eigenvalues();
  const double lambda_max = lambda.size() > 0 ? lambda.maxCoeff() : 0.0;
  if (!(lambda_max > 0.0)) {
    throw Error(ErrorCode::degenerate_variance,
                "test undefined: estimated variance is zero over the horizon");
  }
  const double tol = lambda_max * 1e-12 * static_cast<double>(dim);
  int rank = 0;
  double chi = 0.0;
  for (Eigen::Index i = 0; i < lambda.size(); ++i) {
    if (lambda(i) > tol) {
      const double proj = eigen.eigenvectors().col(i).dot(u);
      chi += proj * proj / lambda(i);
      ++rank;
    }
  }
  result.chi_square = chi;
  result.df = rank;
  result.singular = rank < dim;
  boost::math::chi_squared_distribution<double> chi2(rank);
  result.p_value = boost::math::cdf(boost::math::complement(chi2, chi));
  return result;
}

KSampleResult two_sample_test(const CountingPanel& panel, WeightFamily weights,
                              double horizon) {
  if (panel.groups().size() != 2) {
    throw Error(ErrorCode::invalid_argument,
                "two-sample test needs exactly two groups, panel has " +
                    std::to_string(panel.groups().size()));
  }
  return k_sample_test(panel, weights, horizon);
}

}  // namespace survkit
