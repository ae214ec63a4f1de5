#include "survkit/cox.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>

namespace survkit {

CoxData CoxData::build(const ValidatedRecords& validated,
                       std::vector<std::size_t> covariate_columns) {
  const auto& records = validated.records();
  for (std::size_t c : covariate_columns) {
    if (c >= validated.covariate_count()) {
      throw Error(ErrorCode::invalid_argument,
                  "covariate column index " + std::to_string(c) +
                      " out of range");
    }
  }

  CoxData data;
  data.p_ = covariate_columns.size();
  const auto n = records.size();
  data.entry_.reserve(n);
  data.exit_.reserve(n);
  data.event_.reserve(n);
  data.subject_.reserve(n);
  data.z_.resize(static_cast<Eigen::Index>(n),
                 static_cast<Eigen::Index>(data.p_));

  std::map<std::string, std::size_t> subject_index;
  std::pair<std::string, std::string> type;
  bool have_type = false;
  for (std::size_t i = 0; i < n; ++i) {
    const auto& r = records[i];
    if (!r.censored()) {
      if (!have_type) {
        type = {r.from, r.to};
        have_type = true;
      } else if (type != std::make_pair(r.from, r.to)) {
        throw Error(ErrorCode::not_survival_data,
                    "proportional hazards fitting needs a single transition "
                    "type");
      }
    }
    data.entry_.push_back(r.entry);
    data.exit_.push_back(r.exit);
    data.event_.push_back(r.censored() ? 0 : 1);
    auto [it, inserted] =
        subject_index.emplace(r.subject, data.subjects_.size());
    if (inserted) data.subjects_.push_back(r.subject);
    data.subject_.push_back(it->second);
    for (std::size_t c = 0; c < data.p_; ++c) {
      const double value = r.covariates[covariate_columns[c]];
      if (!std::isfinite(value)) {
        throw Error(ErrorCode::non_finite_input,
                    "non-finite covariate for subject " + r.subject);
      }
      data.z_(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(c)) =
          value;
    }
  }
  if (!have_type) {
    throw Error(ErrorCode::empty_data, "no events to fit");
  }

  std::vector<double> times;
  for (std::size_t i = 0; i < n; ++i) {
    if (data.event_[i]) times.push_back(data.exit_[i]);
  }
  std::sort(times.begin(), times.end());
  times.erase(std::unique(times.begin(), times.end()), times.end());
  data.event_times_ = std::move(times);
  data.n_events_ = static_cast<std::size_t>(
      std::count(data.event_.begin(), data.event_.end(), char(1)));

  data.by_exit_desc_.resize(n);
  data.by_entry_desc_.resize(n);
  std::iota(data.by_exit_desc_.begin(), data.by_exit_desc_.end(), 0);
  std::iota(data.by_entry_desc_.begin(), data.by_entry_desc_.end(), 0);
  std::sort(data.by_exit_desc_.begin(), data.by_exit_desc_.end(),
            [&](std::size_t a, std::size_t b) {
              return data.exit_[a] > data.exit_[b];
            });
  std::sort(data.by_entry_desc_.begin(), data.by_entry_desc_.end(),
            [&](std::size_t a, std::size_t b) {
              return data.entry_[a] > data.entry_[b];
            });
  return data;
}

CoxData CoxData::build(const ValidatedRecords& validated) {
  std::vector<std::size_t> all(validated.covariate_count());
  std::iota(all.begin(), all.end(), 0);
  return build(validated, std::move(all));
}

// Descending sweep over the event times maintaining the risk-set sums
// S0 = sum exp(eta - shift), S1 = sum exp(eta - shift) Z and optionally S2.
// Records join when the sweep passes their exit and leave at their entry,
// which realizes the (entry, exit] at-risk convention.
struct CoxEngine {
  enum Need { kLoglik = 1, kScore = 2, kInfo = 4 };

  template <typename Visitor>
  static void sweep(const CoxData& data, const Eigen::VectorXd& beta, int need,
                    Visitor&& visit) {
    const auto p = static_cast<Eigen::Index>(data.p_);
    if (beta.size() != p) {
      throw Error(ErrorCode::invalid_argument,
                  "beta has dimension " + std::to_string(beta.size()) +
                      ", expected " + std::to_string(data.p_));
    }
    if (!beta.allFinite()) {
      throw Error(ErrorCode::non_finite_input, "non-finite coefficients");
    }
    const std::size_t n = data.n_records();

    Eigen::VectorXd eta =
        p > 0 ? Eigen::VectorXd(data.z_ * beta)
              : Eigen::VectorXd::Zero(static_cast<Eigen::Index>(n));
    const double shift = n > 0 ? eta.maxCoeff() : 0.0;
    Eigen::VectorXd w(eta.size());
    for (Eigen::Index i = 0; i < eta.size(); ++i) {
      w(i) = std::exp(eta(i) - shift);
    }

    double s0 = 0.0;
    Eigen::VectorXd s1 = Eigen::VectorXd::Zero(p);
    Eigen::MatrixXd s2 = Eigen::MatrixXd::Zero(p, p);
    Eigen::VectorXd sum_z(p);
    const bool want_score = (need & (kScore | kInfo)) != 0;
    const bool want_info = (need & kInfo) != 0;

    std::size_t added = 0, removed = 0;
    const auto& times = data.event_times_;
    for (std::size_t ti = times.size(); ti-- > 0;) {
      const double t = times[ti];
      while (added < n && data.exit_[data.by_exit_desc_[added]] >= t) {
        const auto r = static_cast<Eigen::Index>(data.by_exit_desc_[added]);
        s0 += w(r);
        if (want_score) s1 += w(r) * data.z_.row(r).transpose();
        if (want_info) s2 += w(r) * data.z_.row(r).transpose() * data.z_.row(r);
        ++added;
      }
      while (removed < n && data.entry_[data.by_entry_desc_[removed]] >= t) {
        const auto r = static_cast<Eigen::Index>(data.by_entry_desc_[removed]);
        s0 -= w(r);
        if (want_score) s1 -= w(r) * data.z_.row(r).transpose();
        if (want_info) s2 -= w(r) * data.z_.row(r).transpose() * data.z_.row(r);
        ++removed;
      }
      // Events tied at t form the tail of the records admitted so far.
      double d = 0.0;
      double sum_eta = 0.0;
      sum_z.setZero();
      for (std::size_t idx = added; idx-- > 0;) {
        const std::size_t rec = data.by_exit_desc_[idx];
        if (data.exit_[rec] != t) break;
        if (!data.event_[rec]) continue;
        const auto r = static_cast<Eigen::Index>(rec);
        d += 1.0;
        sum_eta += eta(r);
        if (want_score) sum_z += data.z_.row(r).transpose();
      }
      visit(ti, t, d, sum_eta, sum_z, shift, s0, s1, s2);
    }
  }
};

LoglikValue partial_loglik(const CoxData& data, const Eigen::VectorXd& beta) {
  const auto p = static_cast<Eigen::Index>(data.n_covariates());
  LoglikValue out;
  out.score = Eigen::VectorXd::Zero(p);
  out.information = Eigen::MatrixXd::Zero(p, p);
  CoxEngine::sweep(
      data, beta, CoxEngine::kLoglik | CoxEngine::kScore | CoxEngine::kInfo,
      [&](std::size_t, double, double d, double sum_eta,
          const Eigen::VectorXd& sum_z, double shift, double s0,
          const Eigen::VectorXd& s1, const Eigen::MatrixXd& s2) {
        if (d == 0.0) return;
        out.loglik += sum_eta - d * (shift + std::log(s0));
        const Eigen::VectorXd zbar = s1 / s0;
        out.score += sum_z - d * zbar;
        out.information += d * (s2 / s0 - zbar * zbar.transpose());
      });
  out.information =
      ((out.information + out.information.transpose()) / 2.0).eval();
  return out;
}

namespace {

double loglik_only(const CoxData& data, const Eigen::VectorXd& beta) {
  double ll = 0.0;
  CoxEngine::sweep(data, beta, CoxEngine::kLoglik,
                   [&](std::size_t, double, double d, double sum_eta,
                       const Eigen::VectorXd&, double shift, double s0,
                       const Eigen::VectorXd&, const Eigen::MatrixXd&) {
                     if (d == 0.0) return;
                     ll += sum_eta - d * (shift + std::log(s0));
                   });
  return ll;
}

double linear_predictor(const CoxData& data, const Eigen::VectorXd& beta,
                        std::size_t record) {
  double eta = 0.0;
  for (Eigen::Index c = 0; c < beta.size(); ++c) {
    eta += beta(c) * data.covariate(record, static_cast<std::size_t>(c));
  }
  return eta;
}

}  // namespace

StepFunction breslow_baseline(const CoxData& data,
                              const Eigen::VectorXd& beta) {
  std::vector<double> increments(data.event_times().size(), 0.0);
  CoxEngine::sweep(data, beta, CoxEngine::kLoglik,
                   [&](std::size_t ti, double, double d, double,
                       const Eigen::VectorXd&, double shift, double s0,
                       const Eigen::VectorXd&, const Eigen::MatrixXd&) {
                     if (d == 0.0) return;
                     increments[ti] = d * std::exp(-shift) / s0;
                   });
  std::vector<double> cumulative(increments.size());
  double a = 0.0;
  for (std::size_t i = 0; i < increments.size(); ++i) {
    a += increments[i];
    cumulative[i] = a;
  }
  return StepFunction(0.0, data.event_times(), std::move(cumulative));
}

CoxFit fit(const CoxData& data, const CoxOptions& options) {
  const auto p = static_cast<Eigen::Index>(data.n_covariates());
  Eigen::VectorXd beta =
      options.init.size() == 0 ? Eigen::VectorXd::Zero(p) : options.init;
  LoglikValue eval = partial_loglik(data, beta);

  int iterations = 0;
  bool converged = p == 0 || eval.score.lpNorm<Eigen::Infinity>() <=
                                 options.tolerance;
  bool monotone = false;
  while (!converged && iterations < options.max_iterations) {
    Eigen::LDLT<Eigen::MatrixXd> ldlt(eval.information);
    Eigen::VectorXd step = ldlt.solve(eval.score);
    if (ldlt.info() != Eigen::Success || !step.allFinite()) {
      throw Error(ErrorCode::singular_information,
                  "singular information matrix during Newton-Raphson");
    }
    Eigen::VectorXd candidate = beta + step;
    double candidate_ll = loglik_only(data, candidate);
    // Step halving on genuine overshoots; rounding-level non-improvement is
    // accepted, otherwise the final Newton steps stall on loglik noise.
    const double slack = 1e-10 * (std::abs(eval.loglik) + 1.0);
    for (int halvings = 0;
         (!std::isfinite(candidate_ll) || candidate_ll < eval.loglik - slack) &&
         halvings < 30;
         ++halvings) {
      step /= 2.0;
      candidate = beta + step;
      candidate_ll = loglik_only(data, candidate);
    }
    beta = candidate;
    eval = partial_loglik(data, beta);
    ++iterations;
    converged =
        eval.score.lpNorm<Eigen::Infinity>() <= options.tolerance &&
        step.lpNorm<Eigen::Infinity>() <= options.step_tolerance;
    if (!converged &&
        beta.lpNorm<Eigen::Infinity>() > options.coefficient_bound) {
      monotone = true;  // coefficients diverge while the score stays nonzero
      break;
    }
  }

  // Separation can also surface as a numerically flat likelihood: the score
  // and information underflow to zero far from the origin and the zero
  // Newton step reads as convergence. A collapsed information matrix at a
  // large coefficient is that signature.
  if (converged && p > 0 && beta.lpNorm<Eigen::Infinity>() > 2.0) {
    const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eigen(
        eval.information);
    const double lambda_max = eigen.eigenvalues().maxCoeff();
    if (eigen.eigenvalues().minCoeff() <= 1e-12 * std::max(lambda_max, 1.0)) {
      converged = false;
      monotone = true;
    }
  }

  CoxFit result;
  result.beta = beta;
  result.loglik = eval.loglik;
  result.information = eval.information;
  result.iterations = iterations;
  result.converged = converged;
  result.monotone_likelihood = monotone;
  result.baseline = breslow_baseline(data, beta);

  result.residual_finals.assign(data.subjects().size(), 0.0);
  const StepFunction& a0 = result.baseline;
  for (std::size_t r = 0; r < data.n_records(); ++r) {
    const double risk = std::exp(linear_predictor(data, beta, r));
    const double expected = risk * (a0(data.exit(r)) - a0(data.entry(r)));
    result.residual_finals[data.subject_of(r)] +=
        (data.is_event(r) ? 1.0 : 0.0) - expected;
  }
  return result;
}

Eigen::VectorXd CoxFit::standard_errors() const {
  const auto p = information.rows();
  if (p == 0) return Eigen::VectorXd();
  Eigen::LDLT<Eigen::MatrixXd> ldlt(information);
  Eigen::MatrixXd inverse = ldlt.solve(Eigen::MatrixXd::Identity(p, p));
  if (ldlt.info() != Eigen::Success || !inverse.allFinite()) {
    throw Error(ErrorCode::singular_information,
                "information matrix is singular; no standard errors");
  }
  return inverse.diagonal().cwiseMax(0.0).cwiseSqrt();
}

std::vector<StepFunction> martingale_residuals(const CoxData& data,
                                               const Eigen::VectorXd& beta) {
  const StepFunction a0 = breslow_baseline(data, beta);
  const auto& times = data.event_times();

  std::vector<std::map<double, double>> deltas(data.subjects().size());
  for (std::size_t r = 0; r < data.n_records(); ++r) {
    const double risk = std::exp(linear_predictor(data, beta, r));
    auto lo = std::upper_bound(times.begin(), times.end(), data.entry(r));
    auto hi = std::upper_bound(times.begin(), times.end(), data.exit(r));
    for (auto it = lo; it != hi; ++it) {
      const auto ti = static_cast<std::size_t>(it - times.begin());
      const double da = a0.values()[ti] - (ti == 0 ? 0.0 : a0.values()[ti - 1]);
      deltas[data.subject_of(r)][*it] -= risk * da;
    }
    if (data.is_event(r)) {
      deltas[data.subject_of(r)][data.exit(r)] += 1.0;
    }
  }

  std::vector<StepFunction> paths;
  paths.reserve(deltas.size());
  for (const auto& subject_deltas : deltas) {
    std::vector<double> jump_times, values;
    jump_times.reserve(subject_deltas.size());
    values.reserve(subject_deltas.size());
    double m = 0.0;
    for (const auto& [time, delta] : subject_deltas) {
      m += delta;
      jump_times.push_back(time);
      values.push_back(m);
    }
    paths.emplace_back(0.0, std::move(jump_times), std::move(values));
  }
  return paths;
}

ScoreProcess score_process(const CoxData& data, const Eigen::VectorXd& beta) {
  const auto p = static_cast<Eigen::Index>(data.n_covariates());
  const auto m = data.event_times().size();
  std::vector<Eigen::VectorXd> increments(m, Eigen::VectorXd::Zero(p));
  CoxEngine::sweep(data, beta, CoxEngine::kScore,
                   [&](std::size_t ti, double, double d, double,
                       const Eigen::VectorXd& sum_z, double, double s0,
                       const Eigen::VectorXd& s1, const Eigen::MatrixXd&) {
                     if (d == 0.0) return;
                     increments[ti] = sum_z - d * (s1 / s0);
                   });
  ScoreProcess process;
  process.times = data.event_times();
  process.values.reserve(m);
  Eigen::VectorXd u = Eigen::VectorXd::Zero(p);
  for (std::size_t i = 0; i < m; ++i) {
    u += increments[i];
    process.values.push_back(u);
  }
  process.final = u;
  return process;
}

}  // namespace survkit
