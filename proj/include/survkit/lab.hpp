#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "survkit/event_data.hpp"
#include "survkit/univariate.hpp"

namespace survkit::lab {

// Deterministic generator: mt19937_64 driven, with uniforms and normals built
// from raw 64-bit words so the stream does not depend on the standard
// library's distribution implementations.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}
  std::uint64_t next() { return engine_(); }
  double uniform();  // open interval (0,1)
  double normal();   // Box-Muller, consumes two uniforms

 private:
  std::mt19937_64 engine_;
};

// splitmix64-style derivation; subject i of replicate r uses
// derive_seed(derive_seed(seed, r), i) so draws do not depend on n.
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t counter);

// Piecewise-constant hazard: levels[i] on [breakpoints[i], breakpoints[i+1]),
// last level extending to infinity. Cumulative hazard and its inverse are
// exact, so simulation truth never involves quadrature.
struct PiecewiseHazard {
  std::vector<double> breakpoints{0.0};
  std::vector<double> levels{0.0};

  static PiecewiseHazard constant(double rate);
  void validate() const;
  double rate_at(double t) const;
  double cumulative(double t) const;
  // Smallest t with cumulative(t) >= h; +inf when never reached.
  double inverse(double h) const;
  double final_level() const;
};

struct CovariateColumn {
  enum class Kind { normal, bernoulli };
  Kind kind = Kind::normal;
  double mean = 0.0;  // normal
  double sd = 1.0;
  double prob = 0.5;  // bernoulli
  std::string name;
};

struct MultiStateModel {
  std::vector<std::string> states;
  std::vector<PiecewiseHazard> rates;  // k*k row-major, diagonal ignored
  std::size_t initial_state = 0;

  const PiecewiseHazard& rate(std::size_t from, std::size_t to) const;
};

struct CensoringSpec {
  enum class Scheme { none, type1, type2, random, adversarial };
  Scheme scheme = Scheme::none;
  std::vector<double> fixed_times;  // type1: one shared time or one per subject
  int event_count = 0;              // type2: observation stops at the r-th event
  PiecewiseHazard hazard;           // random: independent censoring times
  // Adversarial (dependent, deliberately non-independent): subjects whose
  // exponential event residual exceeds `threshold` are censored at `time`.
  double threshold = 0.0;
  double time = 0.0;
};

struct SimulationSpec {
  int subjects = 0;
  PiecewiseHazard hazard;  // survival mode
  std::optional<MultiStateModel> multistate;
  std::vector<CovariateColumn> covariates;  // survival mode only
  std::vector<double> beta;  // per-subject multiplier exp(beta'Z)
  CensoringSpec censoring;
  std::string group;
  std::string id_prefix;
  std::string alive_state = "alive";
  std::string event_state = "dead";

  void validate() const;  // throws ErrorCode::invalid_spec
};

// Event histories under the multiplicative intensity model; bit-identical
// for identical (seed, spec).
std::vector<EventRecord> simulate(const SimulationSpec& spec,
                                  std::uint64_t seed);

// ---------------------------------------------------------------------------
// Empirical checks of the martingale structure.

struct MartingaleCheckConfig {
  std::vector<double> grid;
  int replicates = 0;
  std::uint64_t seed = 0;
  double mean_flag_sigma = 4.0;
  double ratio_low = 0.9;
  double ratio_high = 1.1;
  double min_compensator = 5.0;  // ratio checked only where <M> is this large
};

struct MartingaleGridPoint {
  double time = 0.0;
  double mean_martingale = 0.0;
  double se_mean = 0.0;
  double var_martingale = 0.0;
  double mean_predictable = 0.0;     // <M> = int alpha Y, exact
  double mean_optional_grid = 0.0;   // sum over grid cells of (dM)^2
  double mean_optional_exact = 0.0;  // [M] over jumps, equals N(t)
  bool mean_flag = false;
  bool ratio_flag = false;
  bool ratio_checked = false;
};

struct MartingaleReport {
  int replicates = 0;
  std::vector<MartingaleGridPoint> points;
  int mean_flags = 0;
  int ratio_flags = 0;
};

// Pooled counting-process martingale M = N - int alpha Y against the known
// hazard. Survival specs without covariates only.
MartingaleReport martingale_check(const SimulationSpec& spec,
                                  const MartingaleCheckConfig& config);

enum class CltEstimator { nelson_aalen, kaplan_meier, cox_score };

struct CltConfig {
  std::vector<int> sample_sizes;
  int replicates = 0;
  std::vector<double> eval_times;
  double max_jump_horizon = 0.0;  // 0: use the largest eval time
  std::uint64_t seed = 0;
};

struct CltTimePoint {
  double time = 0.0;
  double mean_scaled_error = 0.0;  // sqrt(n) (est - truth)
  double var_scaled_error = 0.0;
  double limit_variance = 0.0;  // analytic int alpha / y (scaled for KM)
  double skewness = 0.0;
  double excess_kurtosis = 0.0;
};

struct CltScorePoint {
  double time = 0.0;
  double covariance_rel_error = 0.0;  // ||cov U_t/sqrt(n) - mean I_t/n|| / ||.||
  std::vector<double> skewness;
  std::vector<double> excess_kurtosis;
};

struct CltSampleReport {
  int n = 0;
  std::vector<CltTimePoint> points;
  std::vector<CltScorePoint> score_points;
  double mean_max_jump = 0.0;  // of sqrt(n)(est - truth) up to the horizon
};

struct CltReport {
  CltEstimator estimator = CltEstimator::nelson_aalen;
  std::vector<CltSampleReport> per_n;
};

CltReport clt_check(const SimulationSpec& spec, CltEstimator estimator,
                    const CltConfig& config);

enum class CoverageTarget { nelson_aalen, kaplan_meier };

struct CoverageConfig {
  double time = 0.0;
  double level = 0.95;
  CiScale scale = CiScale::transformed;
  int replicates = 0;
  std::uint64_t seed = 0;
};

struct CoverageReport {
  double truth = 0.0;
  int replicates = 0;
  int covered = 0;
  double coverage = 0.0;
  double se = 0.0;  // binomial
};

CoverageReport coverage_check(const SimulationSpec& spec, CoverageTarget target,
                              const CoverageConfig& config);

// Analytic truth under a spec: cumulative hazard and the large-sample
// variance int_0^t alpha / y with y = exp(-(A + A_censor)).
double true_cumulative_hazard(const SimulationSpec& spec, double t);
double limit_variance_na(const SimulationSpec& spec, double t);

}  // namespace survkit::lab
