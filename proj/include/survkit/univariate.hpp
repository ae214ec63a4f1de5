#pragma once

#include <optional>
#include <string_view>
#include <vector>

#include "survkit/event_data.hpp"
#include "survkit/step_function.hpp"

namespace survkit {

enum class CiScale {
  transformed,  // log scale for cumulative hazards, log(-log) for survival
  linear,
};

struct ConfidenceBand {
  double level = 0.0;
  StepFunction lower;
  StepFunction upper;
};

// Nelson-Aalen estimate of a cumulative transition hazard. `jumps` keeps the
// increments dN/Y exactly as computed, so plug-in product-integrals built
// from them reproduce Kaplan-Meier bit for bit.
struct CumulativeHazardEstimate {
  StepFunction hazard;
  StepFunction variance;  // optional-variation estimate, sum of dN/Y^2
  std::vector<double> jumps;
  std::vector<long> at_risk;
  std::optional<ConfidenceBand> band;
};

struct SurvivalEstimate {
  StepFunction survival;
  StepFunction variance;  // Greenwood form S^2 * sum dN/(Y(Y-dN))
  std::vector<double> factors;  // 1 - dN/Y per jump time
  std::vector<long> at_risk;
  std::optional<ConfidenceBand> band;
};

// A(t) = sum over grid times <= t of dN/Y for the given transition.
// Throws ErrorCode::unknown_transition when the pair is not in the state
// space. Estimates are frozen at their last value once the risk set empties.
CumulativeHazardEstimate nelson_aalen(const CountingPanel& panel,
                                      std::string_view from,
                                      std::string_view to);

// S(t) = prod over grid times <= t of (1 - dN/Y). Requires a single observed
// transition type; a time with dN = Y drops the estimate to 0 and freezes the
// variance at its previous value.
SurvivalEstimate kaplan_meier(const CountingPanel& panel);

// Pointwise intervals. The transformed scale uses A*exp(+-z*sqrt(var)/A) for
// hazards and S^exp(-+z*se(log(-log S))) for survival; points with a
// degenerate value (A=0, S=0 or 1) collapse to a zero-width interval.
CumulativeHazardEstimate with_confidence(CumulativeHazardEstimate estimate,
                                         double level,
                                         CiScale scale = CiScale::transformed);
SurvivalEstimate with_confidence(SurvivalEstimate estimate, double level,
                                 CiScale scale = CiScale::transformed);

}  // namespace survkit
