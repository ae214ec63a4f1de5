#include "survkit/lab.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>

#include "survkit/cox.hpp"
#include "survkit/multistate.hpp"

namespace survkit::lab {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

}  // namespace

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t counter) {
  return splitmix64(seed ^ splitmix64(counter + 0x632BE59BD9B4E019ULL));
}

double Rng::uniform() {
  // 53-bit mantissa shifted into the open interval (0,1).
  return (static_cast<double>(engine_() >> 11) + 0.5) * 0x1.0p-53;
}

double Rng::normal() {
  const double u1 = uniform();
  const double u2 = uniform();
  return std::sqrt(-2.0 * std::log(u1)) *
         std::cos(2.0 * 3.14159265358979323846 * u2);
}

// ---------------------------------------------------------------- hazards

PiecewiseHazard PiecewiseHazard::constant(double rate) {
  PiecewiseHazard h;
  h.breakpoints = {0.0};
  h.levels = {rate};
  return h;
}

void PiecewiseHazard::validate() const {
  if (breakpoints.empty() || breakpoints.size() != levels.size()) {
    throw Error(ErrorCode::invalid_spec,
                "hazard needs one level per breakpoint");
  }
  if (breakpoints[0] != 0.0) {
    throw Error(ErrorCode::invalid_spec, "hazard must start at time 0");
  }
  for (std::size_t i = 0; i < breakpoints.size(); ++i) {
    if (!std::isfinite(breakpoints[i]) || !std::isfinite(levels[i]) ||
        levels[i] < 0.0) {
      throw Error(ErrorCode::invalid_spec,
                  "hazard breakpoints and levels must be finite, levels >= 0");
    }
    if (i > 0 && !(breakpoints[i] > breakpoints[i - 1])) {
      throw Error(ErrorCode::invalid_spec,
                  "hazard breakpoints must be strictly increasing");
    }
  }
}

double PiecewiseHazard::rate_at(double t) const {
  auto it = std::upper_bound(breakpoints.begin(), breakpoints.end(), t);
  if (it == breakpoints.begin()) return levels[0];
  return levels[static_cast<std::size_t>(it - breakpoints.begin()) - 1];
}

double PiecewiseHazard::cumulative(double t) const {
  if (!(t > 0.0)) return 0.0;
  double total = 0.0;
  for (std::size_t i = 0; i < breakpoints.size(); ++i) {
    const double lo = breakpoints[i];
    if (lo >= t) break;
    const double hi =
        i + 1 < breakpoints.size() ? std::min(breakpoints[i + 1], t) : t;
    total += levels[i] * (hi - lo);
  }
  return total;
}

double PiecewiseHazard::inverse(double h) const {
  if (!(h > 0.0)) return 0.0;
  double cum = 0.0;
  for (std::size_t i = 0; i < breakpoints.size(); ++i) {
    const double lo = breakpoints[i];
    const bool last = i + 1 == breakpoints.size();
    const double len = last ? kInf : breakpoints[i + 1] - lo;
    if (levels[i] > 0.0) {
      const double gain = levels[i] * len;
      if (last || h <= cum + gain) {
        return lo + (h - cum) / levels[i];
      }
      cum += gain;
    }
  }
  return kInf;
}

double PiecewiseHazard::final_level() const { return levels.back(); }

namespace {

PiecewiseHazard sum_hazards(const std::vector<const PiecewiseHazard*>& parts) {
  std::vector<double> breaks;
  for (const auto* h : parts) {
    breaks.insert(breaks.end(), h->breakpoints.begin(), h->breakpoints.end());
  }
  std::sort(breaks.begin(), breaks.end());
  breaks.erase(std::unique(breaks.begin(), breaks.end()), breaks.end());
  PiecewiseHazard out;
  out.breakpoints = breaks;
  out.levels.assign(breaks.size(), 0.0);
  for (std::size_t i = 0; i < breaks.size(); ++i) {
    for (const auto* h : parts) out.levels[i] += h->rate_at(breaks[i]);
  }
  return out;
}

bool identically_zero(const PiecewiseHazard& h) {
  return std::all_of(h.levels.begin(), h.levels.end(),
                     [](double level) { return level == 0.0; });
}

}  // namespace

const PiecewiseHazard& MultiStateModel::rate(std::size_t from,
                                             std::size_t to) const {
  return rates[from * states.size() + to];
}

// ------------------------------------------------------------- validation

void SimulationSpec::validate() const {
  if (subjects < 1) {
    throw Error(ErrorCode::invalid_spec, "need at least one subject");
  }
  const auto scheme = censoring.scheme;
  using Scheme = CensoringSpec::Scheme;

  if (scheme == Scheme::type1) {
    if (censoring.fixed_times.empty() ||
        (censoring.fixed_times.size() != 1 &&
         censoring.fixed_times.size() != static_cast<std::size_t>(subjects))) {
      throw Error(ErrorCode::invalid_spec,
                  "type1 censoring needs one shared time or one per subject");
    }
    for (double c : censoring.fixed_times) {
      if (!(c > 0.0) || !std::isfinite(c)) {
        throw Error(ErrorCode::invalid_spec,
                    "type1 censoring times must be positive and finite");
      }
    }
  }
  if (scheme == Scheme::type2) {
    if (censoring.event_count < 1 || censoring.event_count > subjects) {
      throw Error(ErrorCode::invalid_spec,
                  "type2 event count must lie in [1, subjects]");
    }
  }
  if (scheme == Scheme::random) censoring.hazard.validate();
  if (scheme == Scheme::adversarial) {
    if (!(censoring.time > 0.0) || !(censoring.threshold > 0.0)) {
      throw Error(ErrorCode::invalid_spec,
                  "adversarial censoring needs positive threshold and time");
    }
  }

  if (multistate) {
    const auto& model = *multistate;
    const std::size_t k = model.states.size();
    if (k < 2 || model.rates.size() != k * k || model.initial_state >= k) {
      throw Error(ErrorCode::invalid_spec, "malformed multi-state model");
    }
    if (!covariates.empty() || !beta.empty()) {
      throw Error(ErrorCode::invalid_spec,
                  "covariates are only supported for survival simulation");
    }
    if (scheme == Scheme::type2 || scheme == Scheme::adversarial) {
      throw Error(ErrorCode::invalid_spec,
                  "type2/adversarial censoring needs a survival model");
    }
    for (const auto& h : model.rates) h.validate();
    const bool bounded =
        scheme == Scheme::type1 ||
        (scheme == Scheme::random && censoring.hazard.final_level() > 0.0);
    for (std::size_t h = 0; h < k; ++h) {
      std::vector<const PiecewiseHazard*> row;
      for (std::size_t j = 0; j < k; ++j) {
        if (j != h) row.push_back(&model.rate(h, j));
      }
      const auto total = sum_hazards(row);
      if (identically_zero(total)) continue;  // absorbing
      if (total.final_level() <= 0.0 && !bounded) {
        throw Error(ErrorCode::invalid_spec,
                    "state '" + model.states[h] +
                        "' can be occupied forever; add an observation bound");
      }
    }
    return;
  }

  hazard.validate();
  if (beta.size() != covariates.size()) {
    throw Error(ErrorCode::invalid_spec,
                "beta length must match the covariate count");
  }
  for (const auto& column : covariates) {
    if (column.kind == CovariateColumn::Kind::bernoulli &&
        !(column.prob >= 0.0 && column.prob <= 1.0)) {
      throw Error(ErrorCode::invalid_spec,
                  "bernoulli probability must lie in [0, 1]");
    }
    if (column.kind == CovariateColumn::Kind::normal && !(column.sd >= 0.0)) {
      throw Error(ErrorCode::invalid_spec, "normal sd must be >= 0");
    }
  }
  const bool bounded =
      scheme == Scheme::type1 ||
      (scheme == Scheme::random && censoring.hazard.final_level() > 0.0);
  if (hazard.final_level() <= 0.0 && !bounded) {
    throw Error(ErrorCode::invalid_spec,
                "event hazard vanishes eventually; add an observation bound");
  }
  if ((scheme == Scheme::type2 || scheme == Scheme::adversarial) &&
      hazard.final_level() <= 0.0) {
    throw Error(ErrorCode::invalid_spec,
                "type2/adversarial censoring needs events to keep occurring");
  }
}

// -------------------------------------------------------------- simulate

namespace {

std::string subject_id(const SimulationSpec& spec, int i) {
  return spec.id_prefix + std::to_string(i + 1);
}

std::vector<EventRecord> simulate_survival(const SimulationSpec& spec,
                                           std::uint64_t seed) {
  using Scheme = CensoringSpec::Scheme;
  const int n = spec.subjects;
  const std::size_t p = spec.covariates.size();

  struct Draw {
    std::vector<double> z;
    double residual = 0.0;  // exponential event residual
    double event_time = 0.0;
    double censor_time = kInf;
  };
  std::vector<Draw> draws(static_cast<std::size_t>(n));

  for (int i = 0; i < n; ++i) {
    Rng rng(derive_seed(seed, static_cast<std::uint64_t>(i)));
    auto& d = draws[static_cast<std::size_t>(i)];
    d.z.resize(p);
    double eta = 0.0;
    for (std::size_t c = 0; c < p; ++c) {
      const auto& column = spec.covariates[c];
      if (column.kind == CovariateColumn::Kind::normal) {
        d.z[c] = column.mean + column.sd * rng.normal();
      } else {
        d.z[c] = rng.uniform() < column.prob ? 1.0 : 0.0;
      }
      eta += spec.beta[c] * d.z[c];
    }
    const double u_event = rng.uniform();
    const double u_censor = rng.uniform();
    d.residual = -std::log1p(-u_event);
    d.event_time = spec.hazard.inverse(d.residual / std::exp(eta));

    switch (spec.censoring.scheme) {
      case Scheme::none:
      case Scheme::type2:
        break;
      case Scheme::type1:
        d.censor_time = spec.censoring.fixed_times.size() == 1
                            ? spec.censoring.fixed_times[0]
                            : spec.censoring.fixed_times[static_cast<std::size_t>(i)];
        break;
      case Scheme::random:
        d.censor_time = spec.censoring.hazard.inverse(-std::log1p(-u_censor));
        break;
      case Scheme::adversarial:
        if (d.residual > spec.censoring.threshold) {
          d.censor_time = spec.censoring.time;
        }
        break;
    }
  }

  if (spec.censoring.scheme == Scheme::type2) {
    // Observation stops at the r-th event; later subjects are censored there.
    std::vector<int> order(static_cast<std::size_t>(n));
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](int a, int b) {
      const auto& da = draws[static_cast<std::size_t>(a)];
      const auto& db = draws[static_cast<std::size_t>(b)];
      if (da.event_time != db.event_time) return da.event_time < db.event_time;
      return a < b;
    });
    const int r = spec.censoring.event_count;
    const double tau =
        draws[static_cast<std::size_t>(order[static_cast<std::size_t>(r - 1)])]
            .event_time;
    for (int rank = 0; rank < n; ++rank) {
      auto& d = draws[static_cast<std::size_t>(order[static_cast<std::size_t>(rank)])];
      if (rank < r) {
        d.censor_time = kInf;
      } else {
        d.censor_time = tau;
        d.event_time = kInf;
      }
    }
  }

  std::vector<EventRecord> records;
  records.reserve(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    const auto& d = draws[static_cast<std::size_t>(i)];
    EventRecord r;
    r.subject = subject_id(spec, i);
    r.group = spec.group;
    r.entry = 0.0;
    r.from = spec.alive_state;
    if (d.event_time <= d.censor_time) {
      r.exit = d.event_time;
      r.to = spec.event_state;
    } else {
      r.exit = d.censor_time;
      r.to = kCensored;
    }
    r.covariates = d.z;
    records.push_back(std::move(r));
  }
  return records;
}

std::vector<EventRecord> simulate_multistate(const SimulationSpec& spec,
                                             std::uint64_t seed) {
  using Scheme = CensoringSpec::Scheme;
  const auto& model = *spec.multistate;
  const std::size_t k = model.states.size();

  // Total out-rate per state, precomputed once.
  std::vector<PiecewiseHazard> totals;
  totals.reserve(k);
  for (std::size_t h = 0; h < k; ++h) {
    std::vector<const PiecewiseHazard*> row;
    for (std::size_t j = 0; j < k; ++j) {
      if (j != h) row.push_back(&model.rate(h, j));
    }
    totals.push_back(sum_hazards(row));
  }

  std::vector<EventRecord> records;
  for (int i = 0; i < spec.subjects; ++i) {
    Rng rng(derive_seed(seed, static_cast<std::uint64_t>(i)));
    const double u_censor = rng.uniform();
    double censor = kInf;
    if (spec.censoring.scheme == Scheme::type1) {
      censor = spec.censoring.fixed_times.size() == 1
                   ? spec.censoring.fixed_times[0]
                   : spec.censoring.fixed_times[static_cast<std::size_t>(i)];
    } else if (spec.censoring.scheme == Scheme::random) {
      censor = spec.censoring.hazard.inverse(-std::log1p(-u_censor));
    }

    std::size_t state = model.initial_state;
    double now = 0.0;
    for (long guard = 0; guard < 1000000; ++guard) {
      const auto& total = totals[state];
      if (identically_zero(total)) break;  // absorbing
      const double residual = -std::log1p(-rng.uniform());
      const double u_dest = rng.uniform();
      const double next = total.inverse(total.cumulative(now) + residual);
      if (next >= censor) {
        EventRecord r;
        r.subject = subject_id(spec, i);
        r.group = spec.group;
        r.entry = now;
        r.exit = censor;
        r.from = model.states[state];
        r.to = kCensored;
        records.push_back(std::move(r));
        break;
      }
      // Destination proportional to the rates in force at the jump time;
      // fall back to the left limit if the jump lands on a breakpoint that
      // opens a zero-rate segment.
      std::vector<double> weights(k, 0.0);
      double total_weight = 0.0;
      for (std::size_t j = 0; j < k; ++j) {
        if (j == state) continue;
        weights[j] = model.rate(state, j).rate_at(next);
        total_weight += weights[j];
      }
      if (total_weight <= 0.0) {
        const double before = std::nextafter(next, now);
        total_weight = 0.0;
        for (std::size_t j = 0; j < k; ++j) {
          if (j == state) continue;
          weights[j] = model.rate(state, j).rate_at(before);
          total_weight += weights[j];
        }
      }
      std::size_t dest = state;
      double cum = 0.0;
      for (std::size_t j = 0; j < k; ++j) {
        if (j == state || weights[j] == 0.0) continue;
        cum += weights[j] / total_weight;
        if (u_dest <= cum || j + 1 == k) {
          dest = j;
          break;
        }
      }
      if (dest == state) {  // numeric guard: assign last positive weight
        for (std::size_t j = k; j-- > 0;) {
          if (j != state && weights[j] > 0.0) {
            dest = j;
            break;
          }
        }
      }
      EventRecord r;
      r.subject = subject_id(spec, i);
      r.group = spec.group;
      r.entry = now;
      r.exit = next;
      r.from = model.states[state];
      r.to = model.states[dest];
      records.push_back(std::move(r));
      state = dest;
      now = next;
    }
  }
  return records;
}

}  // namespace

std::vector<EventRecord> simulate(const SimulationSpec& spec,
                                  std::uint64_t seed) {
  spec.validate();
  return spec.multistate ? simulate_multistate(spec, seed)
                         : simulate_survival(spec, seed);
}

// ------------------------------------------------------ martingale check

MartingaleReport martingale_check(const SimulationSpec& spec,
                                  const MartingaleCheckConfig& config) {
  spec.validate();
  if (spec.multistate || !spec.covariates.empty()) {
    throw Error(ErrorCode::invalid_spec,
                "martingale_check needs a plain survival spec");
  }
  if (config.grid.empty() || config.replicates < 1) {
    throw Error(ErrorCode::empty_study, "empty grid or no replicates");
  }

  const std::size_t g = config.grid.size();
  std::vector<double> mean(g, 0.0), m2(g, 0.0), sum_pred(g, 0.0),
      sum_grid_var(g, 0.0), sum_exact(g, 0.0);

  std::vector<double> m_path(g), cell_sq(g);
  for (int rep = 0; rep < config.replicates; ++rep) {
    const auto records = simulate(spec, derive_seed(config.seed, rep));
    for (std::size_t gi = 0; gi < g; ++gi) {
      const double t = config.grid[gi];
      double events = 0.0;
      double compensator = 0.0;
      for (const auto& r : records) {
        if (!r.censored() && r.exit <= t) events += 1.0;
        if (t > r.entry) {
          compensator += spec.hazard.cumulative(std::min(r.exit, t)) -
                         spec.hazard.cumulative(r.entry);
        }
      }
      m_path[gi] = events - compensator;
      sum_pred[gi] += compensator;
      sum_exact[gi] += events;  // [M] over jumps: unit jumps squared
    }
    double cum = 0.0;
    for (std::size_t gi = 0; gi < g; ++gi) {
      const double prev = gi == 0 ? 0.0 : m_path[gi - 1];
      const double dm = m_path[gi] - prev;
      cum += dm * dm;
      cell_sq[gi] = cum;
      sum_grid_var[gi] += cum;
    }
    // Welford per grid point.
    for (std::size_t gi = 0; gi < g; ++gi) {
      const double delta = m_path[gi] - mean[gi];
      mean[gi] += delta / (rep + 1);
      m2[gi] += delta * (m_path[gi] - mean[gi]);
    }
  }

  MartingaleReport report;
  report.replicates = config.replicates;
  const double r = config.replicates;
  for (std::size_t gi = 0; gi < g; ++gi) {
    MartingaleGridPoint point;
    point.time = config.grid[gi];
    point.mean_martingale = mean[gi];
    point.var_martingale = r > 1 ? m2[gi] / (r - 1) : 0.0;
    point.se_mean = std::sqrt(point.var_martingale / r);
    point.mean_predictable = sum_pred[gi] / r;
    point.mean_optional_grid = sum_grid_var[gi] / r;
    point.mean_optional_exact = sum_exact[gi] / r;
    point.mean_flag = point.se_mean > 0.0 &&
                      std::abs(point.mean_martingale) >
                          config.mean_flag_sigma * point.se_mean;
    point.ratio_checked = point.mean_predictable >= config.min_compensator;
    if (point.ratio_checked) {
      const double ratio = point.var_martingale / point.mean_predictable;
      point.ratio_flag = ratio < config.ratio_low || ratio > config.ratio_high;
    }
    report.mean_flags += point.mean_flag ? 1 : 0;
    report.ratio_flags += point.ratio_flag ? 1 : 0;
    report.points.push_back(point);
  }
  return report;
}

// -------------------------------------------------------------- analytic

double true_cumulative_hazard(const SimulationSpec& spec, double t) {
  return spec.hazard.cumulative(t);
}

namespace {

// int_0^t alpha(s) exp(A(s) + A_c(s)) ds, exact on the merged segments.
double limit_variance(const PiecewiseHazard& alpha,
                      const PiecewiseHazard* censor, double t) {
  std::vector<double> breaks = alpha.breakpoints;
  if (censor) {
    breaks.insert(breaks.end(), censor->breakpoints.begin(),
                  censor->breakpoints.end());
  }
  std::sort(breaks.begin(), breaks.end());
  breaks.erase(std::unique(breaks.begin(), breaks.end()), breaks.end());

  double total = 0.0;
  for (std::size_t i = 0; i < breaks.size(); ++i) {
    const double lo = breaks[i];
    if (lo >= t) break;
    const double hi = i + 1 < breaks.size() ? std::min(breaks[i + 1], t) : t;
    const double a = alpha.rate_at(lo);
    const double c = censor ? censor->rate_at(lo) : 0.0;
    const double p0 =
        alpha.cumulative(lo) + (censor ? censor->cumulative(lo) : 0.0);
    const double q = a + c;
    if (a == 0.0) continue;
    if (q > 0.0) {
      total += (a / q) * std::exp(p0) * (std::exp(q * (hi - lo)) - 1.0);
    } else {
      total += a * std::exp(p0) * (hi - lo);
    }
  }
  return total;
}

const PiecewiseHazard* censor_hazard_for_limits(const SimulationSpec& spec,
                                                double max_time) {
  using Scheme = CensoringSpec::Scheme;
  switch (spec.censoring.scheme) {
    case Scheme::none:
      return nullptr;
    case Scheme::type1: {
      const double c = *std::min_element(spec.censoring.fixed_times.begin(),
                                         spec.censoring.fixed_times.end());
      if (max_time > c) {
        throw Error(ErrorCode::invalid_spec,
                    "evaluation times must precede the fixed censoring time");
      }
      return nullptr;  // no attrition before c
    }
    case Scheme::random:
      return &spec.censoring.hazard;
    default:
      throw Error(ErrorCode::invalid_spec,
                  "no analytic risk-set limit under this censoring scheme");
  }
}

struct Moments {
  double mean = 0.0;
  double variance = 0.0;
  double skewness = 0.0;
  double excess_kurtosis = 0.0;
};

Moments moments(const std::vector<double>& values) {
  Moments out;
  const double n = static_cast<double>(values.size());
  if (values.empty()) return out;
  for (double v : values) out.mean += v;
  out.mean /= n;
  double m2 = 0.0, m3 = 0.0, m4 = 0.0;
  for (double v : values) {
    const double d = v - out.mean;
    m2 += d * d;
    m3 += d * d * d;
    m4 += d * d * d * d;
  }
  m2 /= n;
  m3 /= n;
  m4 /= n;
  out.variance = n > 1 ? m2 * n / (n - 1) : 0.0;
  if (m2 > 0.0) {
    out.skewness = m3 / std::pow(m2, 1.5);
    out.excess_kurtosis = m4 / (m2 * m2) - 3.0;
  }
  return out;
}

}  // namespace

double limit_variance_na(const SimulationSpec& spec, double t) {
  return limit_variance(spec.hazard, censor_hazard_for_limits(spec, t), t);
}

// -------------------------------------------------------------- clt check

CltReport clt_check(const SimulationSpec& base, CltEstimator estimator,
                    const CltConfig& config) {
  if (config.sample_sizes.empty() || config.replicates < 1 ||
      config.eval_times.empty()) {
    throw Error(ErrorCode::empty_study,
                "clt_check needs sample sizes, replicates and times");
  }
  CltReport report;
  report.estimator = estimator;

  const double horizon =
      config.max_jump_horizon > 0.0
          ? config.max_jump_horizon
          : *std::max_element(config.eval_times.begin(),
                              config.eval_times.end());

  for (std::size_t ni = 0; ni < config.sample_sizes.size(); ++ni) {
    const int n = config.sample_sizes[ni];
    SimulationSpec spec = base;
    spec.subjects = n;
    spec.validate();
    const std::uint64_t n_seed = derive_seed(config.seed, 1000 + ni);
    const double sqrt_n = std::sqrt(static_cast<double>(n));

    CltSampleReport sample;
    sample.n = n;

    if (estimator == CltEstimator::cox_score) {
      if (spec.covariates.empty()) {
        throw Error(ErrorCode::invalid_spec,
                    "cox_score check needs covariates in the spec");
      }
      const auto p = static_cast<Eigen::Index>(spec.beta.size());
      Eigen::VectorXd beta_true(p);
      for (Eigen::Index c = 0; c < p; ++c) beta_true(c) = spec.beta[c];

      for (double t : config.eval_times) {
        std::vector<Eigen::VectorXd> scores;
        scores.reserve(config.replicates);
        Eigen::MatrixXd info_sum = Eigen::MatrixXd::Zero(p, p);
        for (int rep = 0; rep < config.replicates; ++rep) {
          auto records = simulate(spec, derive_seed(n_seed, rep));
          // administratively stop at t: risk sets before t are unchanged
          std::vector<EventRecord> truncated;
          truncated.reserve(records.size());
          for (auto& r : records) {
            if (r.entry >= t) continue;
            if (r.exit > t) {
              r.exit = t;
              r.to = kCensored;
            }
            truncated.push_back(std::move(r));
          }
          const auto data = CoxData::build(validate_records(truncated));
          const auto value = partial_loglik(data, beta_true);
          scores.push_back(value.score / sqrt_n);
          info_sum += value.information / static_cast<double>(n);
        }
        const Eigen::MatrixXd info_mean =
            info_sum / static_cast<double>(config.replicates);
        Eigen::VectorXd score_mean = Eigen::VectorXd::Zero(p);
        for (const auto& s : scores) score_mean += s;
        score_mean /= static_cast<double>(scores.size());
        Eigen::MatrixXd cov = Eigen::MatrixXd::Zero(p, p);
        for (const auto& s : scores) {
          cov += (s - score_mean) * (s - score_mean).transpose();
        }
        cov /= static_cast<double>(scores.size()) - 1.0;

        CltScorePoint point;
        point.time = t;
        point.covariance_rel_error =
            (cov - info_mean).norm() / info_mean.norm();
        for (Eigen::Index c = 0; c < p; ++c) {
          std::vector<double> coord(scores.size());
          for (std::size_t i = 0; i < scores.size(); ++i) {
            coord[i] = scores[i](c);
          }
          const auto m = moments(coord);
          point.skewness.push_back(m.skewness);
          point.excess_kurtosis.push_back(m.excess_kurtosis);
        }
        sample.score_points.push_back(std::move(point));
      }
      report.per_n.push_back(std::move(sample));
      continue;
    }

    std::vector<std::vector<double>> errors(config.eval_times.size());
    for (auto& e : errors) e.reserve(config.replicates);
    double max_jump_sum = 0.0;

    for (int rep = 0; rep < config.replicates; ++rep) {
      const auto records = simulate(spec, derive_seed(n_seed, rep));
      const auto panel =
          CountingPanel::build(validate_records(std::move(records)));
      if (estimator == CltEstimator::nelson_aalen) {
        const auto est =
            nelson_aalen(panel, spec.alive_state, spec.event_state);
        for (std::size_t ti = 0; ti < config.eval_times.size(); ++ti) {
          const double t = config.eval_times[ti];
          errors[ti].push_back(
              sqrt_n * (est.hazard(t) - spec.hazard.cumulative(t)));
        }
        double max_jump = 0.0;
        for (std::size_t j = 0; j < est.jumps.size(); ++j) {
          if (est.hazard.times()[j] > horizon) break;
          max_jump = std::max(max_jump, est.jumps[j]);
        }
        max_jump_sum += sqrt_n * max_jump;
      } else {
        const auto est = kaplan_meier(panel);
        for (std::size_t ti = 0; ti < config.eval_times.size(); ++ti) {
          const double t = config.eval_times[ti];
          const double truth = std::exp(-spec.hazard.cumulative(t));
          errors[ti].push_back(sqrt_n * (est.survival(t) - truth));
        }
        double max_jump = 0.0;
        double prev = 1.0;
        for (std::size_t j = 0; j < est.survival.size(); ++j) {
          if (est.survival.times()[j] > horizon) break;
          max_jump = std::max(max_jump, prev - est.survival.values()[j]);
          prev = est.survival.values()[j];
        }
        max_jump_sum += sqrt_n * max_jump;
      }
    }

    for (std::size_t ti = 0; ti < config.eval_times.size(); ++ti) {
      const double t = config.eval_times[ti];
      const auto m = moments(errors[ti]);
      CltTimePoint point;
      point.time = t;
      point.mean_scaled_error = m.mean;
      point.var_scaled_error = m.variance;
      point.skewness = m.skewness;
      point.excess_kurtosis = m.excess_kurtosis;
      const double base_variance = limit_variance_na(spec, t);
      if (estimator == CltEstimator::kaplan_meier) {
        const double s = std::exp(-spec.hazard.cumulative(t));
        point.limit_variance = s * s * base_variance;
      } else {
        point.limit_variance = base_variance;
      }
      sample.points.push_back(point);
    }
    sample.mean_max_jump = max_jump_sum / config.replicates;
    report.per_n.push_back(std::move(sample));
  }
  return report;
}

// -------------------------------------------------------- coverage check

CoverageReport coverage_check(const SimulationSpec& spec, CoverageTarget target,
                              const CoverageConfig& config) {
  spec.validate();
  if (config.replicates < 1) {
    throw Error(ErrorCode::empty_study, "coverage_check needs replicates");
  }
  if (spec.multistate) {
    throw Error(ErrorCode::invalid_spec,
                "coverage_check needs a survival spec");
  }

  CoverageReport report;
  report.replicates = config.replicates;
  const double a_true = spec.hazard.cumulative(config.time);
  report.truth = target == CoverageTarget::nelson_aalen ? a_true
                                                        : std::exp(-a_true);

  for (int rep = 0; rep < config.replicates; ++rep) {
    const auto records = simulate(spec, derive_seed(config.seed, rep));
    const auto panel =
        CountingPanel::build(validate_records(std::move(records)));
    double lower, upper;
    if (target == CoverageTarget::nelson_aalen) {
      const auto est = with_confidence(
          nelson_aalen(panel, spec.alive_state, spec.event_state),
          config.level, config.scale);
      lower = est.band->lower(config.time);
      upper = est.band->upper(config.time);
    } else {
      const auto est =
          with_confidence(kaplan_meier(panel), config.level, config.scale);
      lower = est.band->lower(config.time);
      upper = est.band->upper(config.time);
    }
    if (lower <= report.truth && report.truth <= upper) ++report.covered;
  }
  report.coverage =
      static_cast<double>(report.covered) / config.replicates;
  report.se = std::sqrt(report.coverage * (1.0 - report.coverage) /
                        config.replicates);
  return report;
}

}  // namespace survkit::lab
