#include "survkit/event_data.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>
#include <sstream>

namespace survkit {

namespace {

std::string describe(const ValidationIssue& issue) {
  std::ostringstream os;
  os << "subject " << issue.subject << ": " << issue.detail;
  return os.str();
}

}  // namespace

ValidatedRecords validate_records(std::vector<EventRecord> records,
                                  std::vector<std::string> state_space) {
  std::vector<ValidationIssue> issues;
  auto add = [&](ValidationCode code, const std::string& subject,
                 std::string detail) {
    issues.push_back({code, subject, std::move(detail)});
  };

  const bool explicit_space = !state_space.empty();
  std::set<std::string> states(state_space.begin(), state_space.end());
  if (states.count(kCensored)) {
    throw Error(ErrorCode::invalid_argument,
                "state space must not contain the CENSORED label");
  }

  std::size_t covariate_count = records.empty() ? 0 : records[0].covariates.size();
  for (const auto& r : records) {
    std::ostringstream os;
    if (!std::isfinite(r.entry) || !std::isfinite(r.exit)) {
      add(ValidationCode::non_finite_time, r.subject,
          "entry/exit times must be finite");
      continue;
    }
    if (r.entry < 0) {
      os << "entry " << r.entry << " is negative";
      add(ValidationCode::non_finite_time, r.subject, os.str());
    }
    if (!(r.exit > r.entry)) {
      os.str("");
      os << "exit " << r.exit << " <= entry " << r.entry;
      add(ValidationCode::non_positive_duration, r.subject, os.str());
    }
    if (r.from == kCensored) {
      add(ValidationCode::unknown_state, r.subject,
          "CENSORED is not a valid source state");
    } else if (explicit_space && !states.count(r.from)) {
      add(ValidationCode::unknown_state, r.subject,
          "unknown state '" + r.from + "'");
    }
    if (!r.censored()) {
      if (r.to == r.from) {
        add(ValidationCode::self_transition, r.subject,
            "transition from '" + r.from + "' to itself");
      } else if (explicit_space && !states.count(r.to)) {
        add(ValidationCode::unknown_state, r.subject,
            "unknown state '" + r.to + "'");
      }
    }
    if (r.covariates.size() != covariate_count) {
      os.str("");
      os << "expected " << covariate_count << " covariates, got "
         << r.covariates.size();
      add(ValidationCode::covariate_mismatch, r.subject, os.str());
    }
    if (!explicit_space) {
      states.insert(r.from);
      if (!r.censored()) states.insert(r.to);
    }
  }

  // Per-subject intervals must be (entry, exit] disjoint.
  std::map<std::string, std::vector<std::pair<double, double>>> intervals;
  for (const auto& r : records) {
    if (std::isfinite(r.entry) && std::isfinite(r.exit) && r.exit > r.entry) {
      intervals[r.subject].emplace_back(r.entry, r.exit);
    }
  }
  for (auto& [subject, ivs] : intervals) {
    std::sort(ivs.begin(), ivs.end());
    for (std::size_t i = 1; i < ivs.size(); ++i) {
      if (ivs[i].first < ivs[i - 1].second) {
        std::ostringstream os;
        os << "intervals (" << ivs[i - 1].first << ", " << ivs[i - 1].second
           << "] and (" << ivs[i].first << ", " << ivs[i].second
           << "] overlap";
        add(ValidationCode::overlapping_intervals, subject, os.str());
      }
    }
  }

  if (!issues.empty()) {
    std::ostringstream os;
    os << issues.size() << " validation issue(s):";
    for (const auto& issue : issues) os << "\n  " << describe(issue);
    throw ValidationError(std::move(issues), os.str());
  }

  ValidatedRecords out;
  out.records_ = std::move(records);
  out.states_.assign(states.begin(), states.end());
  out.covariate_count_ = covariate_count;
  return out;
}

CountingPanel CountingPanel::build(const ValidatedRecords& validated) {
  const auto& records = validated.records();

  std::set<double> event_times;
  std::set<std::string> group_set;
  for (const auto& r : records) {
    if (!r.censored()) event_times.insert(r.exit);
    group_set.insert(r.group);
  }
  if (event_times.empty()) {
    throw Error(ErrorCode::empty_data, "no non-censored records");
  }

  CountingPanel panel;
  panel.states_ = validated.states();
  panel.groups_.assign(group_set.begin(), group_set.end());
  panel.times_.assign(event_times.begin(), event_times.end());
  panel.n_records_ = records.size();

  const std::size_t m = panel.times_.size();
  const std::size_t k = panel.k();
  const std::size_t g = panel.g();
  panel.dn_.assign(m * g * k * k, 0);
  panel.y_.assign(m * g * k, 0);

  auto state_of = [&](const std::string& label) {
    auto it = std::lower_bound(panel.states_.begin(), panel.states_.end(), label);
    return static_cast<std::size_t>(it - panel.states_.begin());
  };
  auto group_of = [&](const std::string& label) {
    auto it = std::lower_bound(panel.groups_.begin(), panel.groups_.end(), label);
    return static_cast<std::size_t>(it - panel.groups_.begin());
  };

  for (const auto& r : records) {
    if (r.censored()) continue;
    auto it = std::lower_bound(panel.times_.begin(), panel.times_.end(), r.exit);
    const auto t = static_cast<std::size_t>(it - panel.times_.begin());
    const std::size_t gi = group_of(r.group);
    panel.dn_[((t * g + gi) * k + state_of(r.from)) * k + state_of(r.to)] += 1;
  }

  // Y per (group, state): entries and exits sorted once, then counted per
  // grid time with entry < t <= exit.
  std::vector<std::vector<double>> entries(g * k), exits(g * k);
  for (const auto& r : records) {
    const std::size_t cell = group_of(r.group) * k + state_of(r.from);
    entries[cell].push_back(r.entry);
    exits[cell].push_back(r.exit);
  }
  for (auto& v : entries) std::sort(v.begin(), v.end());
  for (auto& v : exits) std::sort(v.begin(), v.end());
  for (std::size_t cell = 0; cell < g * k; ++cell) {
    if (entries[cell].empty()) continue;
    const auto& en = entries[cell];
    const auto& ex = exits[cell];
    for (std::size_t t = 0; t < m; ++t) {
      const double time = panel.times_[t];
      const auto started =
          std::lower_bound(en.begin(), en.end(), time) - en.begin();
      const auto gone = std::lower_bound(ex.begin(), ex.end(), time) - ex.begin();
      panel.y_[t * g * k + cell] = static_cast<long>(started - gone);
    }
  }
  return panel;
}

long CountingPanel::increments(std::size_t time, std::size_t group,
                               std::size_t from, std::size_t to) const {
  return dn_[((time * g() + group) * k() + from) * k() + to];
}

long CountingPanel::increments(std::size_t time, std::size_t from,
                               std::size_t to) const {
  long sum = 0;
  for (std::size_t gi = 0; gi < g(); ++gi) sum += increments(time, gi, from, to);
  return sum;
}

long CountingPanel::at_risk(std::size_t time, std::size_t group,
                            std::size_t state) const {
  return y_[(time * g() + group) * k() + state];
}

long CountingPanel::at_risk(std::size_t time, std::size_t state) const {
  long sum = 0;
  for (std::size_t gi = 0; gi < g(); ++gi) sum += at_risk(time, gi, state);
  return sum;
}

std::optional<std::size_t> CountingPanel::state_index(
    std::string_view label) const {
  auto it = std::lower_bound(states_.begin(), states_.end(), label);
  if (it == states_.end() || *it != label) return std::nullopt;
  return static_cast<std::size_t>(it - states_.begin());
}

std::optional<std::size_t> CountingPanel::group_index(
    std::string_view label) const {
  auto it = std::lower_bound(groups_.begin(), groups_.end(), label);
  if (it == groups_.end() || *it != label) return std::nullopt;
  return static_cast<std::size_t>(it - groups_.begin());
}

std::vector<std::pair<std::size_t, std::size_t>>
CountingPanel::transition_types() const {
  std::vector<std::pair<std::size_t, std::size_t>> pairs;
  for (std::size_t from = 0; from < k(); ++from) {
    for (std::size_t to = 0; to < k(); ++to) {
      long total = 0;
      for (std::size_t t = 0; t < times_.size(); ++t) {
        total += increments(t, from, to);
      }
      if (total > 0) pairs.emplace_back(from, to);
    }
  }
  return pairs;
}

}  // namespace survkit
