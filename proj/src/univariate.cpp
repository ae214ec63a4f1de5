#include "survkit/univariate.hpp"

#include <boost/math/distributions/normal.hpp>
#include <cmath>
#include <limits>
#include <string>

namespace survkit {

namespace {

double normal_quantile(double level) {
  if (!(level > 0.0 && level < 1.0)) {
    throw Error(ErrorCode::invalid_argument,
                "confidence level must lie in (0, 1)");
  }
  boost::math::normal_distribution<double> norm;
  return boost::math::quantile(norm, 1.0 - (1.0 - level) / 2.0);
}

}  // namespace

CumulativeHazardEstimate nelson_aalen(const CountingPanel& panel,
                                      std::string_view from,
                                      std::string_view to) {
  const auto fi = panel.state_index(from);
  const auto ti = panel.state_index(to);
  if (!fi || !ti || *fi == *ti) {
    throw Error(ErrorCode::unknown_transition,
                "transition " + std::string(from) + " -> " + std::string(to) +
                    " is not in the state space");
  }

  std::vector<double> times, cumulative, variance, jumps;
  std::vector<long> at_risk;
  double a = 0.0;
  double v = 0.0;
  for (std::size_t t = 0; t < panel.times().size(); ++t) {
    const long dn = panel.increments(t, *fi, *ti);
    if (dn == 0) continue;
    const long y = panel.at_risk(t, *fi);
    const double jump = static_cast<double>(dn) / static_cast<double>(y);
    a += jump;
    v += static_cast<double>(dn) / (static_cast<double>(y) * static_cast<double>(y));
    times.push_back(panel.times()[t]);
    cumulative.push_back(a);
    variance.push_back(v);
    jumps.push_back(jump);
    at_risk.push_back(y);
  }

  CumulativeHazardEstimate est;
  est.hazard = StepFunction(0.0, times, cumulative);
  est.variance = StepFunction(0.0, std::move(times), std::move(variance));
  est.jumps = std::move(jumps);
  est.at_risk = std::move(at_risk);
  return est;
}

SurvivalEstimate kaplan_meier(const CountingPanel& panel) {
  const auto types = panel.transition_types();
  if (types.size() != 1) {
    throw Error(ErrorCode::not_survival_data,
                "Kaplan-Meier needs a single transition type; panel has " +
                    std::to_string(types.size()));
  }
  const auto [from, to] = types[0];

  std::vector<double> times, survival, variance, factors;
  std::vector<long> at_risk;
  double s = 1.0;
  double greenwood = 0.0;
  double v = 0.0;
  bool absorbed = false;
  for (std::size_t t = 0; t < panel.times().size(); ++t) {
    const long dn = panel.increments(t, from, to);
    if (dn == 0) continue;
    const long y = panel.at_risk(t, from);
    const double factor =
        1.0 - static_cast<double>(dn) / static_cast<double>(y);
    s *= factor;
    if (y > dn && !absorbed) {
      greenwood += static_cast<double>(dn) /
                   (static_cast<double>(y) * static_cast<double>(y - dn));
      v = s * s * greenwood;
    } else {
      // y == dn: terminal drop to 0; variance frozen at its previous value.
      absorbed = true;
    }
    times.push_back(panel.times()[t]);
    survival.push_back(s);
    variance.push_back(v);
    factors.push_back(factor);
    at_risk.push_back(y);
  }

  SurvivalEstimate est;
  est.survival = StepFunction(1.0, times, std::move(survival));
  est.variance = StepFunction(0.0, std::move(times), std::move(variance));
  est.factors = std::move(factors);
  est.at_risk = std::move(at_risk);
  return est;
}

CumulativeHazardEstimate with_confidence(CumulativeHazardEstimate estimate,
                                         double level, CiScale scale) {
  const double z = normal_quantile(level);
  std::vector<double> lower, upper;
  lower.reserve(estimate.hazard.size());
  upper.reserve(estimate.hazard.size());
  for (std::size_t i = 0; i < estimate.hazard.size(); ++i) {
    const double a = estimate.hazard.values()[i];
    const double v = estimate.variance.values()[i];
    if (a <= 0.0) {  // degenerate: no events yet
      lower.push_back(0.0);
      upper.push_back(0.0);
    } else if (scale == CiScale::linear) {
      const double hw = z * std::sqrt(v);
      lower.push_back(std::max(0.0, a - hw));
      upper.push_back(a + hw);
    } else {
      const double hw = z * std::sqrt(v) / a;
      lower.push_back(a * std::exp(-hw));
      upper.push_back(a * std::exp(hw));
    }
  }
  estimate.band = ConfidenceBand{
      level, StepFunction(0.0, estimate.hazard.times(), std::move(lower)),
      StepFunction(0.0, estimate.hazard.times(), std::move(upper))};
  return estimate;
}

SurvivalEstimate with_confidence(SurvivalEstimate estimate, double level,
                                 CiScale scale) {
  const double z = normal_quantile(level);
  std::vector<double> lower, upper;
  lower.reserve(estimate.survival.size());
  upper.reserve(estimate.survival.size());
  for (std::size_t i = 0; i < estimate.survival.size(); ++i) {
    const double s = estimate.survival.values()[i];
    const double v = estimate.variance.values()[i];
    if (s <= 0.0) {
      lower.push_back(0.0);
      upper.push_back(0.0);
    } else if (s >= 1.0) {
      lower.push_back(1.0);
      upper.push_back(1.0);
    } else if (scale == CiScale::linear) {
      const double hw = z * std::sqrt(v);
      lower.push_back(std::max(0.0, s - hw));
      upper.push_back(std::min(1.0, s + hw));
    } else {
      // log(-log) scale keeps the interval inside (0, 1).
      const double se = std::sqrt(v) / (s * std::abs(std::log(s)));
      lower.push_back(std::pow(s, std::exp(z * se)));
      upper.push_back(std::pow(s, std::exp(-z * se)));
    }
  }
  estimate.band = ConfidenceBand{
      level, StepFunction(1.0, estimate.survival.times(), std::move(lower)),
      StepFunction(1.0, estimate.survival.times(), std::move(upper))};
  return estimate;
}

}  // namespace survkit
