#pragma once

#include <Eigen/Core>
#include <cstddef>
#include <string>
#include <vector>

#include "survkit/event_data.hpp"
#include "survkit/step_function.hpp"

namespace survkit {

// Event-ordered view of survival-type records for proportional hazards
// fitting. Each record is at risk on (entry, exit]; time-dependent covariates
// are encoded as several records per subject, so the covariate in force at an
// event time is the one whose interval contains it.
class CoxData {
 public:
  static CoxData build(const ValidatedRecords& records,
                       std::vector<std::size_t> covariate_columns);
  // All covariate columns.
  static CoxData build(const ValidatedRecords& records);

  std::size_t n_covariates() const noexcept { return p_; }
  std::size_t n_records() const noexcept { return entry_.size(); }
  std::size_t n_events() const noexcept { return n_events_; }
  const std::vector<double>& event_times() const noexcept {
    return event_times_;
  }
  const std::vector<std::string>& subjects() const noexcept {
    return subjects_;
  }

  double entry(std::size_t record) const { return entry_[record]; }
  double exit(std::size_t record) const { return exit_[record]; }
  bool is_event(std::size_t record) const { return event_[record] != 0; }
  std::size_t subject_of(std::size_t record) const { return subject_[record]; }
  double covariate(std::size_t record, std::size_t column) const {
    return z_(static_cast<Eigen::Index>(record),
              static_cast<Eigen::Index>(column));
  }

 private:
  friend struct CoxEngine;
  std::vector<double> entry_, exit_;
  std::vector<char> event_;
  Eigen::MatrixXd z_;                  // n_records x p
  std::vector<std::size_t> subject_;   // record -> subject index
  std::vector<std::string> subjects_;  // distinct ids, input order
  std::vector<double> event_times_;    // distinct, ascending
  std::vector<std::size_t> by_exit_desc_, by_entry_desc_;
  std::size_t p_ = 0;
  std::size_t n_events_ = 0;
};

struct LoglikValue {
  double loglik = 0.0;
  Eigen::VectorXd score;
  Eigen::MatrixXd information;
};

// Breslow-tie partial log likelihood with exact first and second derivatives.
// Risk-set sums are max-shifted so large linear predictors cannot overflow.
LoglikValue partial_loglik(const CoxData& data, const Eigen::VectorXd& beta);

struct CoxOptions {
  Eigen::VectorXd init;  // defaults to zeros
  double tolerance = 1e-9;
  // Convergence also requires the Newton step to have collapsed. At an
  // interior maximum steps vanish quadratically; under a monotone likelihood
  // the score decays exponentially while the steps stay O(1), so requiring
  // both lets the coefficient bound catch separation instead of declaring a
  // false convergence.
  double step_tolerance = 1e-5;
  int max_iterations = 50;
  double coefficient_bound = 50.0;  // monotone-likelihood guard
};

struct CoxFit {
  Eigen::VectorXd beta;
  double loglik = 0.0;
  Eigen::MatrixXd information;
  StepFunction baseline;  // Breslow baseline at beta
  std::vector<double> residual_finals;  // per subject, data.subjects() order
  int iterations = 0;
  bool converged = false;
  bool monotone_likelihood = false;

  Eigen::VectorXd standard_errors() const;
};

// Newton-Raphson with step halving from options.init; converged when the
// max-norm of the score is at most options.tolerance.
CoxFit fit(const CoxData& data, const CoxOptions& options = {});

// A0(t) = sum over event times <= t of dN / sum_{at risk} exp(beta'Z).
StepFunction breslow_baseline(const CoxData& data, const Eigen::VectorXd& beta);

// Per-subject residual paths M_i(t) = N_i(t) - int Y_i exp(beta'Z_i) dA0,
// ordered like data.subjects(). The paths sum to zero at every event time.
std::vector<StepFunction> martingale_residuals(const CoxData& data,
                                               const Eigen::VectorXd& beta);

struct ScoreProcess {
  std::vector<double> times;
  std::vector<Eigen::VectorXd> values;  // U_t(beta) after each event time
  Eigen::VectorXd final;
};

ScoreProcess score_process(const CoxData& data, const Eigen::VectorXd& beta);

}  // namespace survkit
