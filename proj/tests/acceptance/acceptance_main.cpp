// Acceptance suite: every release gate in one binary, one line per criterion.
// Usage: acceptance [--cli PATH]   (the CLI path enables the determinism
// criterion; without it that criterion fails).

#include <Eigen/Dense>
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <limits>
#include <sstream>
#include <string>
#include <unistd.h>
#include <vector>

#include "survkit/cox.hpp"
#include "survkit/csv.hpp"
#include "survkit/event_data.hpp"
#include "survkit/ksample.hpp"
#include "survkit/lab.hpp"
#include "survkit/multistate.hpp"
#include "survkit/univariate.hpp"

using namespace survkit;
namespace fs = std::filesystem;

namespace {

struct Check {
  std::vector<std::string> failures;

  void expect(bool ok, const std::string& what) {
    if (!ok) failures.push_back(what);
  }
  void expect_near(double got, double want, double tol,
                   const std::string& what) {
    if (!(std::abs(got - want) <= tol)) {
      std::ostringstream os;
      os << what << ": got " << got << ", want " << want << " +- " << tol;
      failures.push_back(os.str());
    }
  }
  void expect_in(double got, double lo, double hi, const std::string& what) {
    if (!(got >= lo && got <= hi)) {
      std::ostringstream os;
      os << what << ": got " << got << ", want in [" << lo << ", " << hi << "]";
      failures.push_back(os.str());
    }
  }
};

EventRecord rec(std::string id, double entry, double exit, std::string from,
                std::string to, std::string group = "",
                std::vector<double> z = {}) {
  EventRecord r;
  r.subject = std::move(id);
  r.entry = entry;
  r.exit = exit;
  r.from = std::move(from);
  r.to = std::move(to);
  r.group = std::move(group);
  r.covariates = std::move(z);
  return r;
}

std::vector<EventRecord> d1() {
  return {rec("1", 0, 2, "alive", "dead"), rec("2", 0, 3, "alive", "dead"),
          rec("3", 0, 3, "alive", kCensored), rec("4", 0, 5, "alive", "dead"),
          rec("5", 0, 6, "alive", kCensored)};
}

CountingPanel panel_of(std::vector<EventRecord> records) {
  return CountingPanel::build(validate_records(std::move(records)));
}

constexpr double kInf = std::numeric_limits<double>::infinity();

// ------------------------------------------------------------ criterion 1

void criterion_hand_oracles(Check& check) {
  // D1 Nelson-Aalen and Kaplan-Meier
  const auto p1 = panel_of(d1());
  const auto na = nelson_aalen(p1, "alive", "dead");
  check.expect_near(na.hazard(5), 0.95, 1e-10, "D1 A(5)");
  check.expect_near(na.variance(5), 0.3525, 1e-10, "D1 var(5)");
  const auto km = kaplan_meier(p1);
  check.expect_near(km.survival(5), 0.3, 1e-10, "D1 S(5)");

  // D2 log-rank
  const auto p2 = panel_of({rec("a1", 0, 1, "alive", "dead", "A"),
                            rec("a2", 0, 3, "alive", kCensored, "A"),
                            rec("b1", 0, 2, "alive", "dead", "B"),
                            rec("b2", 0, 4, "alive", "dead", "B")});
  const auto lr = two_sample_test(p2, WeightFamily::logrank, kInf);
  check.expect_near(lr.statistic(0), 1.0 / 6.0, 1e-10, "D2 U");
  check.expect_near(lr.covariance(0, 0), 17.0 / 36.0, 1e-10, "D2 V");

  // D3 Aalen-Johansen
  const auto p3 = panel_of({rec("1", 0, 1, "s1", "s2"),
                            rec("2", 0, 2, "s1", "s3"),
                            rec("3", 0, 3, "s1", kCensored)});
  const auto aj = aalen_johansen(cumulative_intensity_matrix(p3), 0, 2);
  const Eigen::MatrixXd p02 = aj.at(2);
  for (int j = 0; j < 3; ++j) {
    check.expect_near(p02(0, j), 1.0 / 3.0, 1e-10, "D3 P(0,2) row entry");
  }

  // D4 Cox maximizer, against the closed form and a grid-search oracle
  const auto d4 = CoxData::build(validate_records(
      {rec("1", 0, 1, "alive", "dead", "", {0.0}),
       rec("2", 0, 2, "alive", "dead", "", {1.0}),
       rec("3", 0, 3, "alive", "dead", "", {0.0}),
       rec("4", 0, 4, "alive", kCensored, "", {1.0})}));
  const auto cox = fit(d4);
  check.expect(cox.converged, "D4 fit converged");
  check.expect_near(cox.beta(0), std::log((-1.0 + std::sqrt(17.0)) / 8.0),
                    1e-9, "D4 beta closed form");

  double lo = -5.0, hi = 5.0;
  auto loglik_at = [&](double b) {
    Eigen::VectorXd beta(1);
    beta << b;
    return partial_loglik(d4, beta).loglik;
  };
  while (hi - lo > 1e-10) {
    const double m1 = lo + (hi - lo) / 3.0;
    const double m2 = hi - (hi - lo) / 3.0;
    if (loglik_at(m1) < loglik_at(m2)) {
      lo = m1;
    } else {
      hi = m2;
    }
  }
  check.expect_near(cox.beta(0), (lo + hi) / 2.0, 1e-6,
                    "D4 beta vs grid search");
}

// ------------------------------------------------------------ criterion 2

void criterion_reductions(Check& check) {
  const auto records = [] {
    lab::SimulationSpec spec;
    spec.subjects = 80;
    spec.hazard = lab::PiecewiseHazard::constant(1.0);
    spec.censoring.scheme = lab::CensoringSpec::Scheme::random;
    spec.censoring.hazard = lab::PiecewiseHazard::constant(0.5);
    return lab::simulate(spec, 404);
  }();
  const auto panel = panel_of(records);
  const auto na = nelson_aalen(panel, "alive", "dead");
  const auto km = kaplan_meier(panel);

  // Kaplan-Meier is the plug-in product-integral of the Nelson-Aalen jumps,
  // bit for bit.
  double product = 1.0;
  bool exact = na.jumps.size() == km.survival.size();
  for (std::size_t i = 0; exact && i < na.jumps.size(); ++i) {
    product *= 1.0 - na.jumps[i];
    exact = product == km.survival.values()[i];
  }
  check.expect(exact, "KM = prod(1 - dA) exactly");

  // Two-state Aalen-Johansen reproduces Kaplan-Meier bit for bit.
  const auto aj = aalen_johansen(cumulative_intensity_matrix(panel), 0,
                                 panel.times().back());
  const auto alive = static_cast<Eigen::Index>(*panel.state_index("alive"));
  bool identical = aj.times == km.survival.times();
  for (std::size_t i = 0; identical && i < aj.times.size(); ++i) {
    identical = aj.matrices[i](alive, alive) == km.survival.values()[i];
  }
  check.expect(identical, "two-state AJ = KM bit-identical");

  // Breslow at beta = 0 equals the pooled Nelson-Aalen exactly.
  auto with_cov = records;
  for (std::size_t i = 0; i < with_cov.size(); ++i) {
    with_cov[i].covariates = {static_cast<double>(i % 2)};
  }
  const auto data = CoxData::build(validate_records(with_cov));
  const auto baseline = breslow_baseline(data, Eigen::VectorXd::Zero(1));
  bool breslow_equal = baseline.times() == na.hazard.times();
  for (std::size_t i = 0; breslow_equal && i < baseline.size(); ++i) {
    breslow_equal = baseline.values()[i] == na.hazard.values()[i];
  }
  check.expect(breslow_equal, "Breslow(beta=0) = pooled NA exactly");

  // k = 2 k-sample equals the two-sample statistic.
  auto grouped = records;
  for (std::size_t i = 0; i < grouped.size(); ++i) {
    grouped[i].group = i % 2 == 0 ? "A" : "B";
  }
  const auto gp = panel_of(grouped);
  const auto two = two_sample_test(gp, WeightFamily::logrank, kInf);
  const auto k2 = k_sample_test(gp, WeightFamily::logrank, kInf);
  check.expect(std::abs(two.chi_square - k2.chi_square) <= 1e-12,
               "k=2 chi-square = two-sample chi-square");
  check.expect(std::abs(two.statistic(0) - k2.statistic(0)) <= 1e-12,
               "k=2 statistic = two-sample statistic");
}

// ------------------------------------------------------------ criterion 3

void criterion_martingale(Check& check) {
  lab::SimulationSpec spec;
  spec.subjects = 100;
  spec.hazard = lab::PiecewiseHazard::constant(1.0);

  lab::MartingaleCheckConfig config;
  config.grid = {0.1, 0.25, 0.5, 0.75, 1.0, 1.25, 1.5, 1.75, 2.0};
  config.replicates = 10000;
  config.seed = 20260301;
  config.ratio_low = 0.95;
  config.ratio_high = 1.05;
  config.min_compensator = 5.0;

  const auto report = lab::martingale_check(spec, config);
  for (const auto& point : report.points) {
    check.expect(!point.mean_flag,
                 "mean M(t) within 4 SE at t=" + std::to_string(point.time));
    if (point.ratio_checked) {
      const double ratio = point.var_martingale / point.mean_predictable;
      check.expect_in(ratio, 0.95, 1.05,
                      "var M / mean <M> at t=" + std::to_string(point.time));
    }
  }
  check.expect(std::any_of(report.points.begin(), report.points.end(),
                           [](const auto& p) { return p.ratio_checked; }),
               "at least one grid point has <M> >= 5");
}

// ------------------------------------------------------------ criterion 4

void criterion_clt(Check& check) {
  lab::SimulationSpec spec;
  spec.subjects = 0;
  spec.hazard = lab::PiecewiseHazard::constant(1.0);

  lab::CltConfig config;
  config.sample_sizes = {100, 400, 500};
  config.replicates = 10000;
  config.eval_times = {std::log(2.0)};  // the 0.5 survival quantile
  config.max_jump_horizon = std::log(2.0);
  config.seed = 20260402;

  const auto report =
      lab::clt_check(spec, lab::CltEstimator::nelson_aalen, config);
  const auto& at500 = report.per_n[2].points[0];
  check.expect(std::abs(at500.skewness) <= 0.15, "skewness of sqrt(n) error");
  check.expect(std::abs(at500.excess_kurtosis) <= 0.15,
               "excess kurtosis of sqrt(n) error");

  const double ratio =
      report.per_n[0].mean_max_jump / report.per_n[1].mean_max_jump;
  check.expect_in(ratio, 1.5, 2.5, "max-jump ratio n=100 vs n=400");
}

// ------------------------------------------------------------ criterion 5

void criterion_coverage(Check& check) {
  lab::SimulationSpec spec;
  spec.subjects = 1000;
  spec.hazard = lab::PiecewiseHazard::constant(0.5);

  lab::CoverageConfig config;
  config.time = 1.0;
  config.level = 0.95;
  config.replicates = 10000;
  config.seed = 20260503;

  const auto na =
      lab::coverage_check(spec, lab::CoverageTarget::nelson_aalen, config);
  check.expect_in(na.coverage, 0.94, 0.96, "NA log-scale CI coverage");

  config.seed = 20260504;
  const auto km =
      lab::coverage_check(spec, lab::CoverageTarget::kaplan_meier, config);
  check.expect_in(km.coverage, 0.94, 0.96, "KM log(-log) CI coverage");
}

// ------------------------------------------------------------ criterion 6

void criterion_calibration(Check& check) {
  auto run = [&](double rate_b, std::uint64_t seed) {
    lab::SimulationSpec a;
    a.subjects = 250;
    a.hazard = lab::PiecewiseHazard::constant(1.0);
    a.group = "A";
    a.id_prefix = "A";
    lab::SimulationSpec b = a;
    b.hazard = lab::PiecewiseHazard::constant(rate_b);
    b.group = "B";
    b.id_prefix = "B";

    const int replicates = 10000;
    int rejections = 0;
    for (int r = 0; r < replicates; ++r) {
      auto records = lab::simulate(a, lab::derive_seed(seed, 2 * r));
      auto more = lab::simulate(b, lab::derive_seed(seed, 2 * r + 1));
      records.insert(records.end(), more.begin(), more.end());
      const auto panel = panel_of(std::move(records));
      const auto test = two_sample_test(panel, WeightFamily::logrank, kInf);
      if (test.p_value < 0.05) ++rejections;
    }
    return static_cast<double>(rejections) / replicates;
  };

  const double size = run(1.0, 20260605);
  check.expect_in(size, 0.04, 0.06, "log-rank type-I error at nominal 0.05");
  const double power = run(2.0, 20260606);
  check.expect(power > 0.9, "log-rank power under hazard ratio 2");
}

// ------------------------------------------------------------ criterion 7

void criterion_cox(Check& check) {
  lab::SimulationSpec spec;
  spec.subjects = 2000;
  spec.hazard = lab::PiecewiseHazard::constant(1.0);
  spec.covariates = {
      {lab::CovariateColumn::Kind::bernoulli, 0.0, 1.0, 0.5, "z1"},
      {lab::CovariateColumn::Kind::normal, 0.0, 1.0, 0.5, "z2"}};
  spec.beta = {0.7, -0.5};
  spec.censoring.scheme = lab::CensoringSpec::Scheme::random;
  spec.censoring.hazard = lab::PiecewiseHazard::constant(0.5);

  Eigen::VectorXd beta_true(2);
  beta_true << 0.7, -0.5;

  const int replicates = 200;
  int within[2] = {0, 0};
  double worst_balance = 0.0;
  bool all_converged = true;
  double fd_error = 0.0;

  for (int r = 0; r < replicates; ++r) {
    const auto records = lab::simulate(spec, lab::derive_seed(20260707, r));
    const auto data = CoxData::build(validate_records(records));
    const auto result = fit(data);
    all_converged = all_converged && result.converged;
    const auto se = result.standard_errors();
    for (int j = 0; j < 2; ++j) {
      if (std::abs(result.beta(j) - beta_true(j)) <= 3.0 * se(j)) {
        ++within[j];
      }
    }
    double balance = 0.0;
    for (double m : result.residual_finals) balance += m;
    worst_balance = std::max(worst_balance, std::abs(balance));

    if (r == 0) {
      // score against central finite differences of the log likelihood
      const auto value = partial_loglik(data, beta_true);
      const double h = 1e-5;
      double scale = std::max(1.0, value.score.cwiseAbs().maxCoeff());
      for (int j = 0; j < 2; ++j) {
        Eigen::VectorXd up = beta_true, down = beta_true;
        up(j) += h;
        down(j) -= h;
        const double fd = (partial_loglik(data, up).loglik -
                           partial_loglik(data, down).loglik) /
                          (2 * h);
        fd_error = std::max(fd_error, std::abs(value.score(j) - fd) / scale);
      }
    }
  }

  check.expect(all_converged, "every replicate converged");
  for (int j = 0; j < 2; ++j) {
    const double fraction = static_cast<double>(within[j]) / replicates;
    check.expect(fraction >= 0.99,
                 "beta_" + std::to_string(j + 1) + " within 3 SE in " +
                     std::to_string(fraction) + " of replicates (need 0.99)");
  }
  check.expect(fd_error <= 1e-6, "score vs finite differences (rel err " +
                                     std::to_string(fd_error) + ")");
  check.expect(worst_balance <= 1e-10,
               "sum of martingale residuals at infinity (worst " +
                   std::to_string(worst_balance) + ")");
}

// ------------------------------------------------------------ criterion 8

void criterion_aj_covariance(Check& check) {
  lab::MultiStateModel model;
  model.states = {"s1", "s2", "s3"};
  model.rates.assign(9, lab::PiecewiseHazard::constant(0.0));
  model.rates[0 * 3 + 1] = lab::PiecewiseHazard::constant(0.3);
  model.rates[0 * 3 + 2] = lab::PiecewiseHazard::constant(0.5);

  lab::SimulationSpec spec;
  spec.subjects = 200;
  spec.multistate = model;
  spec.censoring.scheme = lab::CensoringSpec::Scheme::random;
  spec.censoring.hazard = lab::PiecewiseHazard::constant(0.2);

  const int replicates = 100000;
  std::vector<double> estimates;
  estimates.reserve(replicates);
  double plugin_sum = 0.0;
  const Eigen::Index k = 3;

  for (int r = 0; r < replicates; ++r) {
    const auto records = lab::simulate(spec, lab::derive_seed(20260808, r));
    const auto panel = panel_of(records);
    const auto path =
        aalen_johansen(cumulative_intensity_matrix(panel), 0, 2, true);
    estimates.push_back(path.at(2)(0, 1));
    plugin_sum += path.covariance_at(2)(1 * k + 0, 1 * k + 0);
  }

  double mean = 0.0;
  for (double x : estimates) mean += x;
  mean /= replicates;
  double m2 = 0.0, m4 = 0.0;
  for (double x : estimates) {
    const double d = x - mean;
    m2 += d * d;
    m4 += d * d * d * d;
  }
  m2 /= replicates;
  m4 /= replicates;
  const double empirical = m2 * replicates / (replicates - 1.0);
  const double kurtosis = m4 / (m2 * m2);
  const double se_var =
      empirical *
      std::sqrt((kurtosis - (replicates - 3.0) / (replicates - 1.0)) /
                replicates);

  const double plugin_mean = plugin_sum / replicates;
  std::ostringstream os;
  os << "plug-in var " << plugin_mean << " vs empirical " << empirical
     << " (3 MC SE = " << 3.0 * se_var << ")";
  check.expect(std::abs(plugin_mean - empirical) <= 3.0 * se_var, os.str());
}

// ------------------------------------------------------------ criterion 9

std::string slurp(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

void criterion_determinism(Check& check, const std::string& cli) {
  if (cli.empty()) {
    check.expect(false, "no --cli path given");
    return;
  }
  const fs::path dir =
      fs::temp_directory_path() /
      ("survkit_acceptance_" + std::to_string(::getpid()));
  fs::create_directories(dir);

  const fs::path data_csv = dir / "d1.csv";
  {
    Dataset dataset;
    dataset.records = validate_records(d1());
    write_records_csv(dataset, data_csv.string());
  }
  const fs::path spec_json = dir / "spec.json";
  {
    std::ofstream out(spec_json);
    out << R"({"subjects": 200, "hazard": 1.0,
               "censoring": {"scheme": "random", "hazard": 0.4}})";
  }
  const fs::path config_json = dir / "study.json";
  {
    std::ofstream out(config_json);
    out << R"({"study": "coverage_check", "seed": 12, "replicates": 400,
               "time": 1.0, "level": 0.95, "target": "kaplan_meier",
               "simulation": {"subjects": 150, "hazard": 1.0}})";
  }

  auto shell = [&](const std::string& command) {
    return std::system(command.c_str()) == 0;
  };
  auto q = [](const fs::path& p) { return "'" + p.string() + "'"; };

  bool ok = true;
  for (int round = 1; round <= 2; ++round) {
    const std::string tag = std::to_string(round);
    ok = ok &&
         shell(cli + " kaplan-meier --input " + q(data_csv) + " --output " +
               q(dir / ("km" + tag + ".csv"))) &&
         shell(cli + " simulate --spec " + q(spec_json) +
               " --seed 7 --output " + q(dir / ("sim" + tag + ".csv"))) &&
         shell(cli + " study --config " + q(config_json) + " --output " +
               q(dir / ("study" + tag + ".json")) + " --summary " +
               q(dir / ("study" + tag + ".csv")));
  }
  check.expect(ok, "CLI invocations succeeded");
  if (ok) {
    for (const std::string name : {"km", "sim"}) {
      check.expect(slurp(dir / (name + "1.csv")) == slurp(dir / (name + "2.csv")),
                   name + " outputs byte-identical");
    }
    check.expect(
        slurp(dir / "study1.json") == slurp(dir / "study2.json"),
        "study reports byte-identical");
    check.expect(
        slurp(dir / "study1.csv") == slurp(dir / "study2.csv"),
        "study summaries byte-identical");
    check.expect(!slurp(dir / "km1.csv").empty(), "outputs nonempty");
  }
  fs::remove_all(dir);
}

}  // namespace

int main(int argc, char** argv) {
  std::string cli;
  for (int i = 1; i + 1 < argc; ++i) {
    if (std::string(argv[i]) == "--cli") cli = argv[i + 1];
  }

  struct Criterion {
    int id;
    std::string name;
    std::function<void(Check&)> body;
  };
  const std::vector<Criterion> criteria = {
      {1, "hand-oracle suite (D1, D2, D3, D4)", criterion_hand_oracles},
      {2, "reduction identities", criterion_reductions},
      {3, "martingale property (mean and variation)", criterion_martingale},
      {4, "CLT operationalization", criterion_clt},
      {5, "confidence interval coverage", criterion_coverage},
      {6, "two-sample test calibration", criterion_calibration},
      {7, "Cox consistency and diagnostics", criterion_cox},
      {8, "Aalen-Johansen covariance vs Monte Carlo", criterion_aj_covariance},
      {9, "byte-identical CLI and study outputs",
       [&](Check& c) { criterion_determinism(c, cli); }},
  };

  int failures = 0;
  for (const auto& criterion : criteria) {
    Check check;
    const auto start = std::chrono::steady_clock::now();
    try {
      criterion.body(check);
    } catch (const std::exception& e) {
      check.failures.push_back(std::string("exception: ") + e.what());
    }
    const double seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
            .count();
    const bool pass = check.failures.empty();
    failures += pass ? 0 : 1;
    std::ostringstream line;
    line << "criterion " << criterion.id << " [" << (pass ? "PASS" : "FAIL")
         << "] " << criterion.name << " (" << std::fixed;
    line.precision(1);
    line << seconds << "s)";
    std::cout << line.str() << '\n';
    for (const auto& failure : check.failures) {
      std::cout << "    - " << failure << '\n';
    }
  }
  std::cout << (failures == 0 ? "ACCEPTANCE: all criteria passed"
                              : "ACCEPTANCE: " + std::to_string(failures) +
                                    " criterion(s) failed")
            << '\n';
  return failures == 0 ? 0 : 1;
}
