#pragma once

#include <string>
#include <vector>

#include "survkit/event_data.hpp"
#include "survkit/lab.hpp"

namespace testkit {

inline survkit::EventRecord rec(std::string id, double entry, double exit,
                                std::string from, std::string to,
                                std::string group = "",
                                std::vector<double> z = {}) {
  survkit::EventRecord r;
  r.subject = std::move(id);
  r.entry = entry;
  r.exit = exit;
  r.from = std::move(from);
  r.to = std::move(to);
  r.group = std::move(group);
  r.covariates = std::move(z);
  return r;
}

// Dataset D1: five survival records, exits 2,3,3,5,6 with the 3 and 6 exits
// censored.
inline std::vector<survkit::EventRecord> d1() {
  return {rec("1", 0, 2, "alive", "dead"),
          rec("2", 0, 3, "alive", "dead"),
          rec("3", 0, 3, "alive", survkit::kCensored),
          rec("4", 0, 5, "alive", "dead"),
          rec("5", 0, 6, "alive", survkit::kCensored)};
}

// Dataset D2: group A exits (1,event),(3,censored); group B (2,event),(4,event).
inline std::vector<survkit::EventRecord> d2() {
  return {rec("a1", 0, 1, "alive", "dead", "A"),
          rec("a2", 0, 3, "alive", survkit::kCensored, "A"),
          rec("b1", 0, 2, "alive", "dead", "B"),
          rec("b2", 0, 4, "alive", "dead", "B")};
}

// Dataset D3: three subjects in state 1, exits (1,->2),(2,->3),(3,censored).
inline std::vector<survkit::EventRecord> d3() {
  return {rec("1", 0, 1, "1", "2"), rec("2", 0, 2, "1", "3"),
          rec("3", 0, 3, "1", survkit::kCensored)};
}

// Dataset D4: four subjects, (exit,status,z) = (1,1,0),(2,1,1),(3,1,0),(4,0,1).
inline std::vector<survkit::EventRecord> d4() {
  return {rec("1", 0, 1, "alive", "dead", "", {0.0}),
          rec("2", 0, 2, "alive", "dead", "", {1.0}),
          rec("3", 0, 3, "alive", "dead", "", {0.0}),
          rec("4", 0, 4, "alive", survkit::kCensored, "", {1.0})};
}

inline survkit::CountingPanel panel_of(std::vector<survkit::EventRecord> records) {
  return survkit::CountingPanel::build(
      survkit::validate_records(std::move(records)));
}

// Small random survival datasets for property checks.
inline std::vector<survkit::EventRecord> random_survival(
    std::uint64_t seed, int n, double censor_rate = 0.5,
    const std::string& group = "") {
  survkit::lab::SimulationSpec spec;
  spec.subjects = n;
  spec.hazard = survkit::lab::PiecewiseHazard::constant(1.0);
  if (censor_rate > 0) {
    spec.censoring.scheme = survkit::lab::CensoringSpec::Scheme::random;
    spec.censoring.hazard = survkit::lab::PiecewiseHazard::constant(censor_rate);
  }
  spec.group = group;
  spec.id_prefix = group;
  return survkit::lab::simulate(spec, seed);
}

}  // namespace testkit
