#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "survkit/error.hpp"

namespace survkit {

// Reserved transition label marking a censored interval end.
inline constexpr const char* kCensored = "CENSORED";

// One observed subject interval (entry, exit]. A subject may contribute
// several non-overlapping intervals (left truncation, time-dependent
// covariates, recurrent transitions).
struct EventRecord {
  std::string subject;
  double entry = 0.0;
  double exit = 0.0;
  std::string from;
  std::string to;  // state label, or kCensored
  std::string group;
  std::vector<double> covariates;

  bool censored() const { return to == kCensored; }
};

enum class ValidationCode {
  non_positive_duration,
  overlapping_intervals,
  unknown_state,
  self_transition,
  non_finite_time,
  covariate_mismatch,
};

struct ValidationIssue {
  ValidationCode code;
  std::string subject;
  std::string detail;
};

class ValidationError : public Error {
 public:
  ValidationError(std::vector<ValidationIssue> issues, std::string what)
      : Error(ErrorCode::validation, what), issues_(std::move(issues)) {}
  const std::vector<ValidationIssue>& issues() const noexcept {
    return issues_;
  }

 private:
  std::vector<ValidationIssue> issues_;
};

// Record set that passed validation against a state space. Non-empty
// instances are only obtainable through validate_records.
class ValidatedRecords {
 public:
  ValidatedRecords() = default;
  const std::vector<EventRecord>& records() const noexcept { return records_; }
  const std::vector<std::string>& states() const noexcept { return states_; }
  std::size_t covariate_count() const noexcept { return covariate_count_; }

 private:
  friend ValidatedRecords validate_records(std::vector<EventRecord>,
                                           std::vector<std::string>);
  std::vector<EventRecord> records_;
  std::vector<std::string> states_;
  std::size_t covariate_count_ = 0;
};

// Checks every record invariant and reports all violations at once. With an
// empty state_space the space is inferred as the sorted set of labels seen.
ValidatedRecords validate_records(std::vector<EventRecord> records,
                                  std::vector<std::string> state_space = {});

// Aggregated event-time grid. Grid times are the distinct exit times of
// non-censored records; censoring exits do not create grid points but do
// shrink later risk sets. Y uses the left-continuous at-risk convention
// Y(t,h) = #{records : entry < t <= exit, from = h}, so a subject censored
// at an event time still counts as at risk there.
class CountingPanel {
 public:
  static CountingPanel build(const ValidatedRecords& records);

  const std::vector<std::string>& states() const noexcept { return states_; }
  const std::vector<std::string>& groups() const noexcept { return groups_; }
  const std::vector<double>& times() const noexcept { return times_; }
  std::size_t n_records() const noexcept { return n_records_; }

  // dN and Y, pooled over groups or per group.
  long increments(std::size_t time, std::size_t from, std::size_t to) const;
  long increments(std::size_t time, std::size_t group, std::size_t from,
                  std::size_t to) const;
  long at_risk(std::size_t time, std::size_t state) const;
  long at_risk(std::size_t time, std::size_t group, std::size_t state) const;

  std::optional<std::size_t> state_index(std::string_view label) const;
  std::optional<std::size_t> group_index(std::string_view label) const;

  // Distinct (from, to) pairs with at least one observed transition.
  std::vector<std::pair<std::size_t, std::size_t>> transition_types() const;

 private:
  std::size_t k() const noexcept { return states_.size(); }
  std::size_t g() const noexcept { return groups_.size(); }

  std::vector<std::string> states_;
  std::vector<std::string> groups_;
  std::vector<double> times_;
  std::vector<long> dn_;  // [time][group][from][to]
  std::vector<long> y_;   // [time][group][state]
  std::size_t n_records_ = 0;
};

}  // namespace survkit
