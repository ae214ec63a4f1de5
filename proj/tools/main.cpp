// survkit command line: analysis subcommands over the shared C API.

#include <survkit/survkit.h>

#include <CLI11.hpp>
#include <json.hpp>

#include <charconv>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <iostream>
#include <limits>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

namespace {

using nlohmann::json;

constexpr double kInf = std::numeric_limits<double>::infinity();

struct CliError {
  int exit_code;
  std::string message;
};

int exit_code_for(svk_status status) {
  return status == SVK_ERROR_NUMERIC ? 2 : 1;
}

void check(svk_status status, const std::string& context) {
  if (status != SVK_OK) {
    throw CliError{exit_code_for(status),
                   context + ": " + svk_last_error()};
  }
}

std::string fmt(double value) {
  if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
  char buffer[32];
  auto [ptr, ec] = std::to_chars(buffer, buffer + sizeof(buffer), value);
  (void)ec;
  return std::string(buffer, ptr);
}

// Outputs are built in memory and only written once the computation
// succeeded, so a failing run leaves no partial files.
void write_output(const std::string& text, const std::string& path) {
  if (path.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream out(path);
  if (!out) {
    throw CliError{1, "cannot open '" + path + "' for writing"};
  }
  out << text;
}

double two_sided_p(double z) {
  return std::erfc(std::abs(z) / std::sqrt(2.0));
}

// RAII wrappers around the C handles.
template <typename T, void (*Free)(T*)>
using handle = std::unique_ptr<T, decltype([](T* p) { Free(p); })>;

using dataset_ptr = handle<svk_dataset, svk_dataset_free>;
using panel_ptr = handle<svk_panel, svk_panel_free>;
using curve_ptr = handle<svk_curve, svk_curve_free>;
using path_ptr = handle<svk_transition_path, svk_transition_path_free>;
using test_ptr = handle<svk_test_result, svk_test_result_free>;
using cox_ptr = handle<svk_cox_fit, svk_cox_fit_free>;

dataset_ptr load_dataset(const std::string& path) {
  svk_dataset* raw = nullptr;
  check(svk_dataset_read_csv(path.c_str(), &raw), "reading " + path);
  return dataset_ptr(raw);
}

panel_ptr build_panel(const svk_dataset* data,
                      const std::vector<std::string>& states) {
  std::vector<const char*> pointers;
  for (const auto& s : states) pointers.push_back(s.c_str());
  svk_panel* raw = nullptr;
  check(svk_panel_build(data, pointers.empty() ? nullptr : pointers.data(),
                        pointers.size(), &raw),
        "building panel");
  return panel_ptr(raw);
}

struct CurveRow {
  double time, estimate, variance, lower, upper;
};

std::vector<CurveRow> curve_rows(const svk_curve* curve) {
  std::vector<CurveRow> rows(svk_curve_size(curve));
  for (size_t i = 0; i < rows.size(); ++i) {
    check(svk_curve_row(curve, i, &rows[i].time, &rows[i].estimate,
                        &rows[i].variance, &rows[i].lower, &rows[i].upper),
          "reading curve");
  }
  return rows;
}

std::string curve_csv(const svk_curve* curve) {
  std::ostringstream os;
  os << "time,estimate,variance,lower,upper\n";
  for (const auto& row : curve_rows(curve)) {
    os << fmt(row.time) << ',' << fmt(row.estimate) << ',' << fmt(row.variance)
       << ',' << fmt(row.lower) << ',' << fmt(row.upper) << '\n';
  }
  return os.str();
}

json curve_json(const svk_curve* curve, double level) {
  json j;
  j["origin"] = svk_curve_origin(curve);
  j["level"] = level;
  auto rows = curve_rows(curve);
  json times = json::array(), estimate = json::array(),
       variance = json::array(), lower = json::array(), upper = json::array();
  for (const auto& row : rows) {
    times.push_back(row.time);
    estimate.push_back(row.estimate);
    variance.push_back(row.variance);
    lower.push_back(row.lower);
    upper.push_back(row.upper);
  }
  j["time"] = std::move(times);
  j["estimate"] = std::move(estimate);
  j["variance"] = std::move(variance);
  j["lower"] = std::move(lower);
  j["upper"] = std::move(upper);
  return j;
}

// Staircase coordinates: two rows per jump (pre and post value) so any
// plotting tool can draw the step path by connecting consecutive points.
std::string plot_csv(const svk_curve* curve) {
  std::ostringstream os;
  const bool band = svk_curve_has_band(curve) != 0;
  os << (band ? "x,estimate,lower,upper\n" : "x,estimate\n");
  const auto rows = curve_rows(curve);
  if (rows.empty()) return os.str();
  const double origin = svk_curve_origin(curve);
  double prev_est = origin, prev_lo = origin, prev_hi = origin;
  auto emit = [&](double x, double est, double lo, double hi) {
    os << fmt(x) << ',' << fmt(est);
    if (band) os << ',' << fmt(lo) << ',' << fmt(hi);
    os << '\n';
  };
  emit(0.0, origin, origin, origin);
  for (const auto& row : rows) {
    emit(row.time, prev_est, prev_lo, prev_hi);
    emit(row.time, row.estimate, row.lower, row.upper);
    prev_est = row.estimate;
    prev_lo = row.lower;
    prev_hi = row.upper;
  }
  return os.str();
}

std::string read_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    throw CliError{1, "cannot open '" + path + "' for reading"};
  }
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

std::uint64_t parse_seed_env() {
  const char* env = std::getenv("SURVKIT_SEED");
  if (!env) return 0;
  std::uint64_t value = 0;
  const char* last = env + std::strlen(env);
  auto [ptr, ec] = std::from_chars(env, last, value);
  if (ec != std::errc{} || ptr != last) return 0;
  return value;
}

// ------------------------------------------------------------ subcommands

struct EstimateArgs {
  std::string input, output, plot, format = "csv";
  std::string from, to;
  double level = 0.95;
  bool linear_ci = false;
};

void run_curve_command(const EstimateArgs& args, bool survival) {
  auto data = load_dataset(args.input);
  auto panel = build_panel(data.get(), {});

  curve_ptr curve;
  if (survival) {
    svk_curve* raw = nullptr;
    check(svk_kaplan_meier(panel.get(), &raw), "kaplan-meier");
    curve.reset(raw);
  } else {
    std::string from = args.from, to = args.to;
    if (from.empty() || to.empty()) {
      if (svk_panel_transition_count(panel.get()) != 1) {
        throw CliError{1,
                       "panel has several transition types; pass --from/--to"};
      }
      size_t f = 0, t = 0;
      check(svk_panel_transition(panel.get(), 0, &f, &t), "panel transition");
      from = svk_panel_state(panel.get(), f);
      to = svk_panel_state(panel.get(), t);
    }
    svk_curve* raw = nullptr;
    check(svk_nelson_aalen(panel.get(), from.c_str(), to.c_str(), &raw),
          "nelson-aalen");
    curve.reset(raw);
  }
  check(svk_curve_confidence(curve.get(), args.level, args.linear_ci ? 1 : 0),
        "confidence interval");

  std::string text = args.format == "json"
                         ? curve_json(curve.get(), args.level).dump(2) + "\n"
                         : curve_csv(curve.get());
  write_output(text, args.output);
  if (!args.plot.empty()) write_output(plot_csv(curve.get()), args.plot);
}

struct AjArgs {
  std::string input, output, format = "json";
  std::vector<std::string> states;
  double from_time = 0.0;
  double to_time = kInf;
  bool covariance = false;
};

void run_aalen_johansen(const AjArgs& args) {
  auto data = load_dataset(args.input);
  auto panel = build_panel(data.get(), args.states);

  double to_time = args.to_time;
  if (std::isinf(to_time)) {
    const size_t m = svk_panel_time_count(panel.get());
    check(svk_panel_time(panel.get(), m - 1, &to_time), "panel times");
  }
  svk_transition_path* raw = nullptr;
  check(svk_aalen_johansen(panel.get(), args.from_time, to_time, 1, &raw),
        "aalen-johansen");
  path_ptr path(raw);

  const size_t k = svk_transition_path_state_count(path.get());
  const size_t steps = svk_transition_path_size(path.get());
  std::vector<std::string> states(k);
  for (size_t i = 0; i < k; ++i) {
    states[i] = svk_transition_path_state(path.get(), i);
  }
  std::vector<double> matrix(k * k), variances(k * k);

  if (args.format == "csv") {
    std::ostringstream os;
    os << "time,from,to,estimate,variance\n";
    for (size_t i = 0; i < steps; ++i) {
      double time = 0.0;
      check(svk_transition_path_time(path.get(), i, &time), "path time");
      check(svk_transition_path_matrix(path.get(), i, matrix.data()),
            "path matrix");
      check(svk_transition_path_variances(path.get(), i, variances.data()),
            "path variances");
      for (size_t r = 0; r < k; ++r) {
        for (size_t c = 0; c < k; ++c) {
          os << fmt(time) << ',' << states[r] << ',' << states[c] << ','
             << fmt(matrix[r * k + c]) << ',' << fmt(variances[r * k + c])
             << '\n';
        }
      }
    }
    write_output(os.str(), args.output);
    return;
  }

  json j;
  j["states"] = states;
  j["start"] = args.from_time;
  j["end"] = to_time;
  std::vector<double> covariance(k * k * k * k);
  json path_json = json::array();
  for (size_t i = 0; i < steps; ++i) {
    double time = 0.0;
    check(svk_transition_path_time(path.get(), i, &time), "path time");
    check(svk_transition_path_matrix(path.get(), i, matrix.data()),
          "path matrix");
    check(svk_transition_path_variances(path.get(), i, variances.data()),
          "path variances");
    json entry;
    entry["time"] = time;
    json m = json::array(), v = json::array();
    for (size_t r = 0; r < k; ++r) {
      json mrow = json::array(), vrow = json::array();
      for (size_t c = 0; c < k; ++c) {
        mrow.push_back(matrix[r * k + c]);
        vrow.push_back(variances[r * k + c]);
      }
      m.push_back(std::move(mrow));
      v.push_back(std::move(vrow));
    }
    entry["matrix"] = std::move(m);
    entry["variance"] = std::move(v);
    if (args.covariance) {
      check(svk_transition_path_covariance(path.get(), i, covariance.data()),
            "path covariance");
      json cov = json::array();
      for (size_t r = 0; r < k * k; ++r) {
        json row = json::array();
        for (size_t c = 0; c < k * k; ++c) {
          row.push_back(covariance[r * k * k + c]);
        }
        cov.push_back(std::move(row));
      }
      entry["covariance"] = std::move(cov);
    }
    path_json.push_back(std::move(entry));
  }
  j["path"] = std::move(path_json);
  write_output(j.dump(2) + "\n", args.output);
}

struct TestArgs {
  std::string input, output, weights = "logrank", format = "json";
  double horizon = kInf;
};

void run_test(const TestArgs& args) {
  auto data = load_dataset(args.input);
  auto panel = build_panel(data.get(), {});
  svk_test_result* raw = nullptr;
  check(svk_ksample_test(panel.get(), args.weights.c_str(), args.horizon, &raw),
        "k-sample test");
  test_ptr result(raw);

  const size_t dim = svk_test_result_dim(result.get());
  std::vector<double> statistic(dim), covariance(dim * dim);
  check(svk_test_result_statistic(result.get(), statistic.data()), "statistic");
  check(svk_test_result_covariance(result.get(), covariance.data()),
        "covariance");

  if (args.format == "table") {
    std::ostringstream os;
    os << "weighted k-sample test (" << args.weights << ")\n";
    for (size_t i = 0; i < dim; ++i) {
      os << "  group " << svk_panel_group(panel.get(), i) << ": X = "
         << fmt(statistic[i]) << "  var = " << fmt(covariance[i * dim + i])
         << '\n';
    }
    os << "  chi-square = " << fmt(svk_test_result_chi_square(result.get()))
       << " on " << svk_test_result_df(result.get())
       << " df, p = " << fmt(svk_test_result_p_value(result.get())) << '\n';
    if (svk_test_result_singular(result.get())) {
      os << "  note: singular covariance, df reduced to its rank\n";
    }
    write_output(os.str(), args.output);
    return;
  }

  json j;
  j["statistic"] = statistic;
  json v = json::array();
  for (size_t r = 0; r < dim; ++r) {
    json row = json::array();
    for (size_t c = 0; c < dim; ++c) row.push_back(covariance[r * dim + c]);
    v.push_back(std::move(row));
  }
  j["variance"] = std::move(v);
  j["chi_square"] = svk_test_result_chi_square(result.get());
  j["df"] = svk_test_result_df(result.get());
  j["p_value"] = svk_test_result_p_value(result.get());
  j["weights_used"] = args.weights;
  j["singular"] = svk_test_result_singular(result.get()) != 0;
  write_output(j.dump(2) + "\n", args.output);
}

struct CoxArgs {
  std::string input, output, baseline, residuals;
  std::vector<std::string> covariates;
  double tolerance = 1e-9;
  int max_iter = 50;
};

void run_cox(const CoxArgs& args) {
  auto data = load_dataset(args.input);
  std::vector<const char*> names;
  for (const auto& name : args.covariates) names.push_back(name.c_str());

  svk_cox_fit* raw = nullptr;
  check(svk_cox_fit_run(data.get(), names.empty() ? nullptr : names.data(),
                        names.size(), nullptr, args.tolerance, args.max_iter,
                        &raw),
        "cox fit");
  cox_ptr fit(raw);

  if (svk_cox_monotone(fit.get())) {
    throw CliError{2,
                   "monotone likelihood: a coefficient diverges; no finite "
                   "maximizer exists"};
  }
  if (!svk_cox_converged(fit.get())) {
    throw CliError{2, "Newton-Raphson did not converge"};
  }

  const size_t p = svk_cox_dim(fit.get());
  std::vector<double> beta(p), se(p);
  check(svk_cox_beta(fit.get(), beta.data()), "beta");
  check(svk_cox_standard_errors(fit.get(), se.data()), "standard errors");

  json j;
  j["beta"] = beta;
  j["se"] = se;
  json zs = json::array(), ps = json::array();
  for (size_t i = 0; i < p; ++i) {
    const double z = se[i] > 0 ? beta[i] / se[i] : 0.0;
    zs.push_back(z);
    ps.push_back(two_sided_p(z));
  }
  j["z"] = std::move(zs);
  j["p"] = std::move(ps);
  j["loglik"] = svk_cox_loglik(fit.get());
  j["iterations"] = svk_cox_iterations(fit.get());
  j["converged"] = svk_cox_converged(fit.get()) != 0;
  write_output(j.dump(2) + "\n", args.output);

  if (!args.baseline.empty()) {
    svk_curve* curve_raw = nullptr;
    check(svk_cox_baseline(fit.get(), &curve_raw), "baseline");
    curve_ptr curve(curve_raw);
    std::ostringstream os;
    os << "time,estimate\n";
    for (const auto& row : curve_rows(curve.get())) {
      os << fmt(row.time) << ',' << fmt(row.estimate) << '\n';
    }
    write_output(os.str(), args.baseline);
  }
  if (!args.residuals.empty()) {
    std::ostringstream os;
    os << "id,time,residual\n";
    const size_t n = svk_cox_subject_count(fit.get());
    for (size_t i = 0; i < n; ++i) {
      svk_curve* curve_raw = nullptr;
      check(svk_cox_residual_path(fit.get(), i, &curve_raw), "residual path");
      curve_ptr curve(curve_raw);
      const char* id = svk_cox_subject(fit.get(), i);
      for (const auto& row : curve_rows(curve.get())) {
        os << id << ',' << fmt(row.time) << ',' << fmt(row.estimate) << '\n';
      }
    }
    write_output(os.str(), args.residuals);
  }
}

struct SimulateArgs {
  std::string spec, output;
  std::uint64_t seed = 0;
};

void run_simulate(const SimulateArgs& args) {
  const std::string spec_text = read_file(args.spec);
  svk_dataset* raw = nullptr;
  check(svk_simulate_json(spec_text.c_str(), args.seed, &raw), "simulate");
  dataset_ptr data(raw);
  if (args.output.empty()) {
    throw CliError{1, "simulate needs --output"};
  }
  check(svk_dataset_write_csv(data.get(), args.output.c_str()),
        "writing " + args.output);
}

struct StudyArgs {
  std::string config, output, summary;
  std::optional<std::uint64_t> seed;
};

std::string study_summary_csv(const json& report) {
  std::ostringstream os;
  const std::string study = report.at("study").get<std::string>();
  const json& body = report.at("report");
  if (study == "martingale_check") {
    os << "time,mean_martingale,se_mean,var_martingale,mean_predictable,"
          "mean_optional_grid,mean_optional_exact,mean_flag,ratio_checked,"
          "ratio_flag\n";
    for (const auto& point : body.at("points")) {
      os << fmt(point.at("time").get<double>()) << ','
         << fmt(point.at("mean_martingale").get<double>()) << ','
         << fmt(point.at("se_mean").get<double>()) << ','
         << fmt(point.at("var_martingale").get<double>()) << ','
         << fmt(point.at("mean_predictable").get<double>()) << ','
         << fmt(point.at("mean_optional_grid").get<double>()) << ','
         << fmt(point.at("mean_optional_exact").get<double>()) << ','
         << (point.at("mean_flag").get<bool>() ? 1 : 0) << ','
         << (point.at("ratio_checked").get<bool>() ? 1 : 0) << ','
         << (point.at("ratio_flag").get<bool>() ? 1 : 0) << '\n';
    }
  } else if (study == "clt_check") {
    os << "n,time,mean_scaled_error,var_scaled_error,limit_variance,skewness,"
          "excess_kurtosis,mean_max_jump,covariance_rel_error\n";
    for (const auto& sample : body.at("per_n")) {
      const int n = sample.at("n").get<int>();
      const double jump = sample.at("mean_max_jump").get<double>();
      for (const auto& point : sample.at("points")) {
        os << n << ',' << fmt(point.at("time").get<double>()) << ','
           << fmt(point.at("mean_scaled_error").get<double>()) << ','
           << fmt(point.at("var_scaled_error").get<double>()) << ','
           << fmt(point.at("limit_variance").get<double>()) << ','
           << fmt(point.at("skewness").get<double>()) << ','
           << fmt(point.at("excess_kurtosis").get<double>()) << ','
           << fmt(jump) << ",\n";
      }
      for (const auto& point : sample.at("score_points")) {
        os << n << ',' << fmt(point.at("time").get<double>())
           << ",,,,,," << fmt(jump) << ','
           << fmt(point.at("covariance_rel_error").get<double>()) << '\n';
      }
    }
  } else if (study == "coverage_check") {
    os << "target,truth,replicates,covered,coverage,se\n";
    os << body.at("target").get<std::string>() << ','
       << fmt(body.at("truth").get<double>()) << ','
       << body.at("replicates").get<int>() << ','
       << body.at("covered").get<int>() << ','
       << fmt(body.at("coverage").get<double>()) << ','
       << fmt(body.at("se").get<double>()) << '\n';
  }
  return os.str();
}

void run_study_command(const StudyArgs& args) {
  const std::string config_text = read_file(args.config);
  json config = json::parse(config_text, nullptr, false);
  if (config.is_discarded()) {
    throw CliError{1, "study config is not valid JSON"};
  }
  if (args.seed) {
    config["seed"] = *args.seed;
  } else if (!config.contains("seed")) {
    config["seed"] = parse_seed_env();
  }

  char* report_raw = nullptr;
  check(svk_study_run(config.dump().c_str(), &report_raw), "study");
  std::unique_ptr<char, decltype([](char* p) { svk_string_free(p); })> guard(
      report_raw);
  const json report = json::parse(report_raw);

  write_output(std::string(report_raw) + "\n", args.output);
  if (!args.summary.empty()) {
    write_output(study_summary_csv(report), args.summary);
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"survkit: counting-process survival analysis"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(svk_version()));

  EstimateArgs na_args;
  auto* na = app.add_subcommand(
      "nelson-aalen", "Cumulative hazard estimate with pointwise intervals");
  na->add_option("--input", na_args.input, "records CSV")->required();
  na->add_option("--from", na_args.from, "source state");
  na->add_option("--to", na_args.to, "target state");
  na->add_option("--level", na_args.level, "confidence level (default 0.95)");
  na->add_flag("--linear-ci", na_args.linear_ci,
               "plain linear intervals instead of the log scale");
  na->add_option("--format", na_args.format, "csv or json")
      ->check(CLI::IsMember({"csv", "json"}));
  na->add_option("--output", na_args.output, "output file (default stdout)");
  na->add_option("--plot", na_args.plot, "write staircase plot data here");

  EstimateArgs km_args;
  auto* km = app.add_subcommand("kaplan-meier",
                                "Survival curve with pointwise intervals");
  km->add_option("--input", km_args.input, "records CSV")->required();
  km->add_option("--level", km_args.level, "confidence level (default 0.95)");
  km->add_flag("--linear-ci", km_args.linear_ci,
               "plain linear intervals instead of the log(-log) scale");
  km->add_option("--format", km_args.format, "csv or json")
      ->check(CLI::IsMember({"csv", "json"}));
  km->add_option("--output", km_args.output, "output file (default stdout)");
  km->add_option("--plot", km_args.plot, "write staircase plot data here");

  AjArgs aj_args;
  auto* aj = app.add_subcommand("aalen-johansen",
                                "Empirical transition matrix path");
  aj->add_option("--input", aj_args.input, "records CSV")->required();
  aj->add_option("--states", aj_args.states,
                 "explicit state space (comma separated)")
      ->delimiter(',');
  aj->add_option("--from-time", aj_args.from_time, "start time s (default 0)");
  aj->add_option("--to-time", aj_args.to_time,
                 "end time t (default: last event)");
  aj->add_flag("--covariance", aj_args.covariance,
               "include per-entry variances in JSON output");
  aj->add_option("--format", aj_args.format, "json or csv")
      ->check(CLI::IsMember({"csv", "json"}));
  aj->add_option("--output", aj_args.output, "output file (default stdout)");

  TestArgs test_args;
  auto* test = app.add_subcommand(
      "test", "Weighted k-sample comparison of group hazards");
  test->add_option("--input", test_args.input, "records CSV with groups")
      ->required();
  test->add_option("--weights", test_args.weights,
                   "logrank, gehan, tarone-ware or peto-peto")
      ->check(CLI::IsMember({"logrank", "gehan", "tarone-ware", "peto-peto"}));
  test->add_option("--horizon", test_args.horizon,
                   "restrict the comparison to times <= horizon");
  test->add_option("--format", test_args.format, "json or table")
      ->check(CLI::IsMember({"json", "table"}));
  test->add_option("--output", test_args.output, "output file (default stdout)");

  CoxArgs cox_args;
  auto* cox = app.add_subcommand("cox", "Proportional hazards regression");
  cox->add_option("--input", cox_args.input, "records CSV with covariates")
      ->required();
  cox->add_option("--covariates", cox_args.covariates,
                  "covariate columns (default: all)")
      ->delimiter(',');
  cox->add_option("--tolerance", cox_args.tolerance,
                  "score convergence tolerance (default 1e-9)");
  cox->add_option("--max-iter", cox_args.max_iter,
                  "Newton-Raphson iteration cap (default 50)");
  cox->add_option("--output", cox_args.output, "fit report (default stdout)");
  cox->add_option("--baseline", cox_args.baseline,
                  "write the Breslow baseline CSV here");
  cox->add_option("--residuals", cox_args.residuals,
                  "write per-subject martingale residual paths here");

  SimulateArgs sim_args;
  auto* sim = app.add_subcommand("simulate",
                                 "Draw event histories from a JSON spec");
  sim->add_option("--spec", sim_args.spec, "simulation spec JSON")->required();
  sim->add_option("--seed", sim_args.seed, "RNG seed")
      ->envname("SURVKIT_SEED");
  sim->add_option("--output", sim_args.output, "records CSV to write")
      ->required();

  StudyArgs study_args;
  std::uint64_t study_seed = 0;
  auto* study = app.add_subcommand(
      "study", "Run a Monte Carlo study from a JSON config");
  study->add_option("--config", study_args.config, "study config JSON")
      ->required();
  auto* seed_option =
      study->add_option("--seed", study_seed, "override the config seed")
          ->envname("SURVKIT_SEED");
  study->add_option("--output", study_args.output,
                    "report JSON (default stdout)");
  study->add_option("--summary", study_args.summary,
                    "also write a CSV summary here");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  }

  try {
    if (na->parsed()) run_curve_command(na_args, false);
    if (km->parsed()) run_curve_command(km_args, true);
    if (aj->parsed()) run_aalen_johansen(aj_args);
    if (test->parsed()) run_test(test_args);
    if (cox->parsed()) run_cox(cox_args);
    if (sim->parsed()) run_simulate(sim_args);
    if (study->parsed()) {
      if (seed_option->count() > 0 || std::getenv("SURVKIT_SEED")) {
        study_args.seed = study_seed;
      }
      run_study_command(study_args);
    }
  } catch (const CliError& e) {
    std::cerr << "error: " << e.message << '\n';
    return e.exit_code;
  }
  return 0;
}
