#include "survkit/survkit.h"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <limits>
#include <string>
#include <vector>

#include <json.hpp>

#include "survkit/cox.hpp"
#include "survkit/csv.hpp"
#include "survkit/error.hpp"
#include "survkit/ksample.hpp"
#include "survkit/lab.hpp"
#include "survkit/multistate.hpp"
#include "survkit/study.hpp"
#include "survkit/univariate.hpp"

namespace {

thread_local std::string g_last_error;

svk_status status_for(survkit::ErrorCode code) {
  using survkit::ErrorCode;
  switch (code) {
    case ErrorCode::io:
      return SVK_ERROR_IO;
    case ErrorCode::parse:
      return SVK_ERROR_PARSE;
    case ErrorCode::validation:
      return SVK_ERROR_VALIDATION;
    case ErrorCode::invalid_argument:
    case ErrorCode::invalid_spec:
    case ErrorCode::unknown_transition:
    case ErrorCode::not_survival_data:
    case ErrorCode::empty_data:
    case ErrorCode::empty_study:
    case ErrorCode::one_group_empty:
      return SVK_ERROR_INVALID_ARGUMENT;
    default:
      return SVK_ERROR_NUMERIC;
  }
}

template <typename Fn>
svk_status guarded(Fn&& fn) {
  try {
    fn();
    g_last_error.clear();
    return SVK_OK;
  } catch (const survkit::Error& e) {
    g_last_error = e.what();
    return status_for(e.code());
  } catch (const std::exception& e) {
    g_last_error = e.what();
    return SVK_ERROR_NUMERIC;
  }
}

svk_status fail_argument(const char* message) {
  g_last_error = message;
  return SVK_ERROR_INVALID_ARGUMENT;
}

constexpr double kNan = std::numeric_limits<double>::quiet_NaN();

}  // namespace

struct svk_dataset {
  survkit::Dataset data;
};

struct svk_panel {
  survkit::CountingPanel panel;
};

struct svk_curve {
  double origin = 0.0;
  std::vector<double> times;
  std::vector<double> estimate;
  std::vector<double> variance;
  std::vector<double> lower;
  std::vector<double> upper;
  bool survival_scale = false;  // for confidence transforms
  bool has_band = false;
  double level = 0.0;
};

struct svk_transition_path {
  survkit::TransitionMatrixPath path;
};

struct svk_test_result {
  survkit::KSampleResult result;
};

struct svk_cox_fit {
  survkit::CoxData data;
  survkit::CoxFit fit;
};

extern "C" {

const char* svk_version(void) { return "0.1.0"; }

const char* svk_last_error(void) { return g_last_error.c_str(); }

void svk_string_free(char* s) { delete[] s; }

/* --------------------------------------------------------------- dataset */

svk_status svk_dataset_read_csv(const char* path, svk_dataset** out) {
  if (!path || !out) return fail_argument("null argument");
  return guarded([&] {
    auto handle = new svk_dataset{survkit::read_records_csv(path)};
    *out = handle;
  });
}

svk_status svk_dataset_from_records(const char* const* subject,
                                    const double* entry,
                                    const double* exit_time,
                                    const char* const* from,
                                    const char* const* to,
                                    const char* const* group,
                                    const double* covariates, size_t n,
                                    size_t p, svk_dataset** out) {
  if (!subject || !entry || !exit_time || !from || !to || !out ||
      (p > 0 && !covariates)) {
    return fail_argument("null argument");
  }
  return guarded([&] {
    std::vector<survkit::EventRecord> records;
    records.reserve(n);
    for (size_t i = 0; i < n; ++i) {
      survkit::EventRecord r;
      r.subject = subject[i];
      r.entry = entry[i];
      r.exit = exit_time[i];
      r.from = from[i];
      r.to = to[i];
      if (group) r.group = group[i];
      r.covariates.assign(covariates + i * p, covariates + (i + 1) * p);
      records.push_back(std::move(r));
    }
    survkit::Dataset dataset;
    dataset.records = survkit::validate_records(std::move(records));
    for (size_t c = 0; c < p; ++c) {
      dataset.covariate_names.push_back("z" + std::to_string(c + 1));
    }
    *out = new svk_dataset{std::move(dataset)};
  });
}

svk_status svk_dataset_write_csv(const svk_dataset* data, const char* path) {
  if (!data || !path) return fail_argument("null argument");
  return guarded([&] { survkit::write_records_csv(data->data, path); });
}

void svk_dataset_free(svk_dataset* data) { delete data; }

size_t svk_dataset_size(const svk_dataset* data) {
  return data ? data->data.records.records().size() : 0;
}

size_t svk_dataset_covariate_count(const svk_dataset* data) {
  return data ? data->data.covariate_names.size() : 0;
}

const char* svk_dataset_covariate_name(const svk_dataset* data, size_t index) {
  if (!data || index >= data->data.covariate_names.size()) return nullptr;
  return data->data.covariate_names[index].c_str();
}

svk_status svk_simulate_json(const char* spec_json, uint64_t seed,
                             svk_dataset** out) {
  if (!spec_json || !out) return fail_argument("null argument");
  return guarded([&] {
    const auto parsed = nlohmann::json::parse(
        spec_json, nullptr, /*allow_exceptions=*/false);
    if (parsed.is_discarded()) {
      throw survkit::Error(survkit::ErrorCode::parse,
                           "simulation spec is not valid JSON");
    }
    const auto spec = parsed.get<survkit::lab::SimulationSpec>();
    auto records = survkit::lab::simulate(spec, seed);
    survkit::Dataset dataset;
    dataset.records = survkit::validate_records(std::move(records));
    for (size_t c = 0; c < spec.covariates.size(); ++c) {
      const auto& name = spec.covariates[c].name;
      dataset.covariate_names.push_back(
          name.empty() ? "z" + std::to_string(c + 1) : name);
    }
    *out = new svk_dataset{std::move(dataset)};
  });
}

/* ----------------------------------------------------------------- panel */

svk_status svk_panel_build(const svk_dataset* data, const char* const* states,
                           size_t n_states, svk_panel** out) {
  if (!data || !out || (n_states > 0 && !states)) {
    return fail_argument("null argument");
  }
  return guarded([&] {
    if (n_states > 0) {
      std::vector<std::string> space(states, states + n_states);
      auto validated =
          survkit::validate_records(data->data.records.records(), space);
      *out = new svk_panel{survkit::CountingPanel::build(validated)};
    } else {
      *out = new svk_panel{survkit::CountingPanel::build(data->data.records)};
    }
  });
}

void svk_panel_free(svk_panel* panel) { delete panel; }

size_t svk_panel_time_count(const svk_panel* panel) {
  return panel ? panel->panel.times().size() : 0;
}

size_t svk_panel_state_count(const svk_panel* panel) {
  return panel ? panel->panel.states().size() : 0;
}

size_t svk_panel_group_count(const svk_panel* panel) {
  return panel ? panel->panel.groups().size() : 0;
}

const char* svk_panel_state(const svk_panel* panel, size_t index) {
  if (!panel || index >= panel->panel.states().size()) return nullptr;
  return panel->panel.states()[index].c_str();
}

const char* svk_panel_group(const svk_panel* panel, size_t index) {
  if (!panel || index >= panel->panel.groups().size()) return nullptr;
  return panel->panel.groups()[index].c_str();
}

svk_status svk_panel_time(const svk_panel* panel, size_t index, double* time) {
  if (!panel || !time) return fail_argument("null argument");
  if (index >= panel->panel.times().size()) {
    return fail_argument("index out of range");
  }
  *time = panel->panel.times()[index];
  return SVK_OK;
}

size_t svk_panel_transition_count(const svk_panel* panel) {
  return panel ? panel->panel.transition_types().size() : 0;
}

svk_status svk_panel_transition(const svk_panel* panel, size_t index,
                                size_t* from_state, size_t* to_state) {
  if (!panel || !from_state || !to_state) return fail_argument("null argument");
  const auto types = panel->panel.transition_types();
  if (index >= types.size()) return fail_argument("index out of range");
  *from_state = types[index].first;
  *to_state = types[index].second;
  return SVK_OK;
}

/* ---------------------------------------------------------------- curves */

namespace {

svk_curve* curve_from_hazard(const survkit::CumulativeHazardEstimate& est) {
  auto* curve = new svk_curve;
  curve->origin = 0.0;
  curve->times = est.hazard.times();
  curve->estimate = est.hazard.values();
  curve->variance = est.variance.values();
  curve->survival_scale = false;
  if (est.band) {
    curve->has_band = true;
    curve->level = est.band->level;
    curve->lower = est.band->lower.values();
    curve->upper = est.band->upper.values();
  }
  return curve;
}

svk_curve* curve_from_survival(const survkit::SurvivalEstimate& est) {
  auto* curve = new svk_curve;
  curve->origin = 1.0;
  curve->times = est.survival.times();
  curve->estimate = est.survival.values();
  curve->variance = est.variance.values();
  curve->survival_scale = true;
  if (est.band) {
    curve->has_band = true;
    curve->level = est.band->level;
    curve->lower = est.band->lower.values();
    curve->upper = est.band->upper.values();
  }
  return curve;
}

}  // namespace

svk_status svk_nelson_aalen(const svk_panel* panel, const char* from,
                            const char* to, svk_curve** out) {
  if (!panel || !from || !to || !out) return fail_argument("null argument");
  return guarded([&] {
    *out = curve_from_hazard(survkit::nelson_aalen(panel->panel, from, to));
  });
}

svk_status svk_kaplan_meier(const svk_panel* panel, svk_curve** out) {
  if (!panel || !out) return fail_argument("null argument");
  return guarded(
      [&] { *out = curve_from_survival(survkit::kaplan_meier(panel->panel)); });
}

svk_status svk_curve_confidence(svk_curve* curve, double level,
                                int linear_scale) {
  if (!curve) return fail_argument("null argument");
  return guarded([&] {
    const auto scale =
        linear_scale ? survkit::CiScale::linear : survkit::CiScale::transformed;
    // Rebuild an estimate view and delegate to the library transform.
    if (curve->survival_scale) {
      survkit::SurvivalEstimate est;
      est.survival = survkit::StepFunction(1.0, curve->times, curve->estimate);
      est.variance = survkit::StepFunction(0.0, curve->times, curve->variance);
      est = survkit::with_confidence(std::move(est), level, scale);
      curve->lower = est.band->lower.values();
      curve->upper = est.band->upper.values();
    } else {
      survkit::CumulativeHazardEstimate est;
      est.hazard = survkit::StepFunction(0.0, curve->times, curve->estimate);
      est.variance = survkit::StepFunction(0.0, curve->times, curve->variance);
      est = survkit::with_confidence(std::move(est), level, scale);
      curve->lower = est.band->lower.values();
      curve->upper = est.band->upper.values();
    }
    curve->has_band = true;
    curve->level = level;
  });
}

void svk_curve_free(svk_curve* curve) { delete curve; }

size_t svk_curve_size(const svk_curve* curve) {
  return curve ? curve->times.size() : 0;
}

double svk_curve_origin(const svk_curve* curve) {
  return curve ? curve->origin : kNan;
}

int svk_curve_has_band(const svk_curve* curve) {
  return curve && curve->has_band ? 1 : 0;
}

svk_status svk_curve_row(const svk_curve* curve, size_t index, double* time,
                         double* estimate, double* variance, double* lower,
                         double* upper) {
  if (!curve) return fail_argument("null argument");
  if (index >= curve->times.size()) return fail_argument("index out of range");
  if (time) *time = curve->times[index];
  if (estimate) *estimate = curve->estimate[index];
  if (variance) {
    *variance = index < curve->variance.size() ? curve->variance[index] : kNan;
  }
  if (lower) *lower = curve->has_band ? curve->lower[index] : kNan;
  if (upper) *upper = curve->has_band ? curve->upper[index] : kNan;
  return SVK_OK;
}

/* ------------------------------------------------------------ multistate */

svk_status svk_aalen_johansen(const svk_panel* panel, double s, double t,
                              int with_covariance, svk_transition_path** out) {
  if (!panel || !out) return fail_argument("null argument");
  return guarded([&] {
    const auto intensities = survkit::cumulative_intensity_matrix(panel->panel);
    *out = new svk_transition_path{
        survkit::aalen_johansen(intensities, s, t, with_covariance != 0)};
  });
}

void svk_transition_path_free(svk_transition_path* path) { delete path; }

size_t svk_transition_path_size(const svk_transition_path* path) {
  return path ? path->path.times.size() : 0;
}

size_t svk_transition_path_state_count(const svk_transition_path* path) {
  return path ? path->path.states.size() : 0;
}

const char* svk_transition_path_state(const svk_transition_path* path,
                                      size_t index) {
  if (!path || index >= path->path.states.size()) return nullptr;
  return path->path.states[index].c_str();
}

svk_status svk_transition_path_time(const svk_transition_path* path,
                                    size_t index, double* time) {
  if (!path || !time) return fail_argument("null argument");
  if (index >= path->path.times.size()) {
    return fail_argument("index out of range");
  }
  *time = path->path.times[index];
  return SVK_OK;
}

svk_status svk_transition_path_matrix(const svk_transition_path* path,
                                      size_t index, double* out) {
  if (!path || !out) return fail_argument("null argument");
  if (index >= path->path.matrices.size()) {
    return fail_argument("index out of range");
  }
  const auto& m = path->path.matrices[index];
  const auto k = m.rows();
  for (Eigen::Index r = 0; r < k; ++r) {
    for (Eigen::Index c = 0; c < k; ++c) {
      out[r * k + c] = m(r, c);
    }
  }
  return SVK_OK;
}

svk_status svk_transition_path_variances(const svk_transition_path* path,
                                         size_t index, double* out) {
  if (!path || !out) return fail_argument("null argument");
  if (index >= path->path.covariances.size()) {
    return fail_argument("no covariance stored for this index");
  }
  const auto& cov = path->path.covariances[index];
  const auto k = static_cast<Eigen::Index>(path->path.states.size());
  for (Eigen::Index r = 0; r < k; ++r) {
    for (Eigen::Index c = 0; c < k; ++c) {
      // column-major vec index of entry (r, c)
      out[r * k + c] = cov(c * k + r, c * k + r);
    }
  }
  return SVK_OK;
}

svk_status svk_transition_path_covariance(const svk_transition_path* path,
                                          size_t index, double* out) {
  if (!path || !out) return fail_argument("null argument");
  if (index >= path->path.covariances.size()) {
    return fail_argument("no covariance stored for this index");
  }
  const auto& cov = path->path.covariances[index];
  const auto k = static_cast<Eigen::Index>(path->path.states.size());
  const auto kk = k * k;
  for (Eigen::Index a = 0; a < k; ++a) {
    for (Eigen::Index b = 0; b < k; ++b) {
      for (Eigen::Index c = 0; c < k; ++c) {
        for (Eigen::Index d = 0; d < k; ++d) {
          out[(a * k + b) * kk + (c * k + d)] = cov(b * k + a, d * k + c);
        }
      }
    }
  }
  return SVK_OK;
}

/* ----------------------------------------------------------------- tests */

svk_status svk_ksample_test(const svk_panel* panel, const char* weights,
                            double horizon, svk_test_result** out) {
  if (!panel || !weights || !out) return fail_argument("null argument");
  return guarded([&] {
    const auto family = survkit::weight_family_from_string(weights);
    *out = new svk_test_result{
        survkit::k_sample_test(panel->panel, family, horizon)};
  });
}

void svk_test_result_free(svk_test_result* result) { delete result; }

size_t svk_test_result_dim(const svk_test_result* result) {
  return result ? static_cast<size_t>(result->result.statistic.size()) : 0;
}

svk_status svk_test_result_statistic(const svk_test_result* result,
                                     double* out) {
  if (!result || !out) return fail_argument("null argument");
  for (Eigen::Index i = 0; i < result->result.statistic.size(); ++i) {
    out[i] = result->result.statistic(i);
  }
  return SVK_OK;
}

svk_status svk_test_result_covariance(const svk_test_result* result,
                                      double* out) {
  if (!result || !out) return fail_argument("null argument");
  const auto& v = result->result.covariance;
  for (Eigen::Index r = 0; r < v.rows(); ++r) {
    for (Eigen::Index c = 0; c < v.cols(); ++c) {
      out[r * v.cols() + c] = v(r, c);
    }
  }
  return SVK_OK;
}

double svk_test_result_chi_square(const svk_test_result* result) {
  return result ? result->result.chi_square : kNan;
}

int svk_test_result_df(const svk_test_result* result) {
  return result ? result->result.df : 0;
}

double svk_test_result_p_value(const svk_test_result* result) {
  return result ? result->result.p_value : kNan;
}

int svk_test_result_singular(const svk_test_result* result) {
  return result && result->result.singular ? 1 : 0;
}

/* ------------------------------------------------------------------- cox */

svk_status svk_cox_fit_run(const svk_dataset* data,
                           const char* const* covariate_names,
                           size_t n_covariates, const double* init,
                           double tolerance, int max_iterations,
                           svk_cox_fit** out) {
  if (!data || !out || (n_covariates > 0 && !covariate_names)) {
    return fail_argument("null argument");
  }
  return guarded([&] {
    std::vector<std::size_t> columns;
    if (covariate_names) {
      for (size_t i = 0; i < n_covariates; ++i) {
        const auto& names = data->data.covariate_names;
        auto it = std::find(names.begin(), names.end(), covariate_names[i]);
        if (it == names.end()) {
          throw survkit::Error(
              survkit::ErrorCode::invalid_argument,
              std::string("unknown covariate column '") + covariate_names[i] +
                  "'");
        }
        columns.push_back(static_cast<std::size_t>(it - names.begin()));
      }
    } else {
      columns.resize(data->data.covariate_names.size());
      for (std::size_t i = 0; i < columns.size(); ++i) columns[i] = i;
    }

    auto cox_data = survkit::CoxData::build(data->data.records, columns);
    survkit::CoxOptions options;
    if (init) {
      options.init = Eigen::Map<const Eigen::VectorXd>(
          init, static_cast<Eigen::Index>(columns.size()));
    }
    if (tolerance > 0) options.tolerance = tolerance;
    if (max_iterations > 0) options.max_iterations = max_iterations;
    auto fit = survkit::fit(cox_data, options);
    *out = new svk_cox_fit{std::move(cox_data), std::move(fit)};
  });
}

void svk_cox_fit_free(svk_cox_fit* fit) { delete fit; }

size_t svk_cox_dim(const svk_cox_fit* fit) {
  return fit ? static_cast<size_t>(fit->fit.beta.size()) : 0;
}

svk_status svk_cox_beta(const svk_cox_fit* fit, double* out) {
  if (!fit || !out) return fail_argument("null argument");
  for (Eigen::Index i = 0; i < fit->fit.beta.size(); ++i) {
    out[i] = fit->fit.beta(i);
  }
  return SVK_OK;
}

svk_status svk_cox_standard_errors(const svk_cox_fit* fit, double* out) {
  if (!fit || !out) return fail_argument("null argument");
  return guarded([&] {
    const auto se = fit->fit.standard_errors();
    for (Eigen::Index i = 0; i < se.size(); ++i) out[i] = se(i);
  });
}

svk_status svk_cox_information(const svk_cox_fit* fit, double* out) {
  if (!fit || !out) return fail_argument("null argument");
  const auto& info = fit->fit.information;
  for (Eigen::Index r = 0; r < info.rows(); ++r) {
    for (Eigen::Index c = 0; c < info.cols(); ++c) {
      out[r * info.cols() + c] = info(r, c);
    }
  }
  return SVK_OK;
}

double svk_cox_loglik(const svk_cox_fit* fit) {
  return fit ? fit->fit.loglik : kNan;
}

int svk_cox_iterations(const svk_cox_fit* fit) {
  return fit ? fit->fit.iterations : 0;
}

int svk_cox_converged(const svk_cox_fit* fit) {
  return fit && fit->fit.converged ? 1 : 0;
}

int svk_cox_monotone(const svk_cox_fit* fit) {
  return fit && fit->fit.monotone_likelihood ? 1 : 0;
}

svk_status svk_cox_baseline(const svk_cox_fit* fit, svk_curve** out) {
  if (!fit || !out) return fail_argument("null argument");
  return guarded([&] {
    auto* curve = new svk_curve;
    curve->origin = 0.0;
    curve->times = fit->fit.baseline.times();
    curve->estimate = fit->fit.baseline.values();
    curve->variance.assign(curve->times.size(), kNan);
    *out = curve;
  });
}

size_t svk_cox_subject_count(const svk_cox_fit* fit) {
  return fit ? fit->data.subjects().size() : 0;
}

const char* svk_cox_subject(const svk_cox_fit* fit, size_t index) {
  if (!fit || index >= fit->data.subjects().size()) return nullptr;
  return fit->data.subjects()[index].c_str();
}

double svk_cox_residual_final(const svk_cox_fit* fit, size_t index) {
  if (!fit || index >= fit->fit.residual_finals.size()) return kNan;
  return fit->fit.residual_finals[index];
}

svk_status svk_cox_residual_path(const svk_cox_fit* fit, size_t index,
                                 svk_curve** out) {
  if (!fit || !out) return fail_argument("null argument");
  if (index >= fit->data.subjects().size()) {
    return fail_argument("index out of range");
  }
  return guarded([&] {
    const auto paths = survkit::martingale_residuals(fit->data, fit->fit.beta);
    auto* curve = new svk_curve;
    curve->origin = 0.0;
    curve->times = paths[index].times();
    curve->estimate = paths[index].values();
    curve->variance.assign(curve->times.size(), kNan);
    *out = curve;
  });
}

/* ----------------------------------------------------------------- study */

svk_status svk_study_run(const char* config_json, char** report_json) {
  if (!config_json || !report_json) return fail_argument("null argument");
  return guarded([&] {
    const auto parsed = nlohmann::json::parse(
        config_json, nullptr, /*allow_exceptions=*/false);
    if (parsed.is_discarded()) {
      throw survkit::Error(survkit::ErrorCode::parse,
                           "study config is not valid JSON");
    }
    const auto report = survkit::lab::run_study(parsed);
    const std::string text = report.dump(2);
    char* buffer = new char[text.size() + 1];
    std::memcpy(buffer, text.c_str(), text.size() + 1);
    *report_json = buffer;
  });
}

}  // extern "C"
