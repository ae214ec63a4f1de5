#include "survkit/study.hpp"

#include <string>

namespace survkit::lab {

namespace {

using nlohmann::json;

Error bad_config(const std::string& what) {
  return Error(ErrorCode::invalid_spec, "study config: " + what);
}

CovariateColumn covariate_from_json(const json& j) {
  CovariateColumn column;
  const std::string kind = j.value("kind", "normal");
  if (kind == "normal") {
    column.kind = CovariateColumn::Kind::normal;
    column.mean = j.value("mean", 0.0);
    column.sd = j.value("sd", 1.0);
  } else if (kind == "bernoulli") {
    column.kind = CovariateColumn::Kind::bernoulli;
    column.prob = j.value("prob", 0.5);
  } else {
    throw bad_config("unknown covariate kind '" + kind + "'");
  }
  column.name = j.value("name", "");
  return column;
}

json covariate_to_json(const CovariateColumn& column) {
  json j;
  if (column.kind == CovariateColumn::Kind::normal) {
    j["kind"] = "normal";
    j["mean"] = column.mean;
    j["sd"] = column.sd;
  } else {
    j["kind"] = "bernoulli";
    j["prob"] = column.prob;
  }
  if (!column.name.empty()) j["name"] = column.name;
  return j;
}

CensoringSpec censoring_from_json(const json& j) {
  CensoringSpec spec;
  const std::string scheme = j.value("scheme", "none");
  if (scheme == "none") {
    spec.scheme = CensoringSpec::Scheme::none;
  } else if (scheme == "type1") {
    spec.scheme = CensoringSpec::Scheme::type1;
    if (j.contains("times")) {
      spec.fixed_times = j.at("times").get<std::vector<double>>();
    } else if (j.contains("time")) {
      spec.fixed_times = {j.at("time").get<double>()};
    }
  } else if (scheme == "type2") {
    spec.scheme = CensoringSpec::Scheme::type2;
    spec.event_count = j.value("event_count", 0);
  } else if (scheme == "random") {
    spec.scheme = CensoringSpec::Scheme::random;
    spec.hazard = j.at("hazard").get<PiecewiseHazard>();
  } else if (scheme == "adversarial") {
    spec.scheme = CensoringSpec::Scheme::adversarial;
    spec.threshold = j.value("threshold", 0.0);
    spec.time = j.value("time", 0.0);
  } else {
    throw bad_config("unknown censoring scheme '" + scheme + "'");
  }
  return spec;
}

json censoring_to_json(const CensoringSpec& spec) {
  json j;
  switch (spec.scheme) {
    case CensoringSpec::Scheme::none:
      j["scheme"] = "none";
      break;
    case CensoringSpec::Scheme::type1:
      j["scheme"] = "type1";
      j["times"] = spec.fixed_times;
      break;
    case CensoringSpec::Scheme::type2:
      j["scheme"] = "type2";
      j["event_count"] = spec.event_count;
      break;
    case CensoringSpec::Scheme::random:
      j["scheme"] = "random";
      j["hazard"] = spec.hazard;
      break;
    case CensoringSpec::Scheme::adversarial:
      j["scheme"] = "adversarial";
      j["threshold"] = spec.threshold;
      j["time"] = spec.time;
      break;
  }
  return j;
}

MultiStateModel multistate_from_json(const json& j) {
  MultiStateModel model;
  model.states = j.at("states").get<std::vector<std::string>>();
  const std::size_t k = model.states.size();
  model.rates.assign(k * k, PiecewiseHazard{});
  auto index_of = [&](const std::string& label) {
    for (std::size_t i = 0; i < k; ++i) {
      if (model.states[i] == label) return i;
    }
    throw bad_config("unknown state '" + label + "' in multistate rates");
  };
  for (const auto& entry : j.at("rates")) {
    const auto from = index_of(entry.at("from").get<std::string>());
    const auto to = index_of(entry.at("to").get<std::string>());
    model.rates[from * k + to] = entry.at("hazard").get<PiecewiseHazard>();
  }
  if (j.contains("initial")) {
    model.initial_state = index_of(j.at("initial").get<std::string>());
  }
  return model;
}

json multistate_to_json(const MultiStateModel& model) {
  json j;
  j["states"] = model.states;
  j["initial"] = model.states[model.initial_state];
  json rates = json::array();
  const std::size_t k = model.states.size();
  for (std::size_t from = 0; from < k; ++from) {
    for (std::size_t to = 0; to < k; ++to) {
      if (from == to) continue;
      const auto& h = model.rate(from, to);
      bool zero = true;
      for (double level : h.levels) zero = zero && level == 0.0;
      if (zero) continue;
      rates.push_back({{"from", model.states[from]},
                       {"to", model.states[to]},
                       {"hazard", h}});
    }
  }
  j["rates"] = std::move(rates);
  return j;
}

}  // namespace

void from_json(const nlohmann::json& j, PiecewiseHazard& hazard) {
  if (j.is_number()) {  // shorthand: constant rate
    hazard = PiecewiseHazard::constant(j.get<double>());
    return;
  }
  hazard.breakpoints = j.at("breakpoints").get<std::vector<double>>();
  hazard.levels = j.at("levels").get<std::vector<double>>();
  hazard.validate();
}

void to_json(nlohmann::json& j, const PiecewiseHazard& hazard) {
  j = nlohmann::json{{"breakpoints", hazard.breakpoints},
                     {"levels", hazard.levels}};
}

void from_json(const nlohmann::json& j, SimulationSpec& spec) {
  spec = SimulationSpec{};
  spec.subjects = j.at("subjects").get<int>();
  if (j.contains("multistate")) {
    spec.multistate = multistate_from_json(j.at("multistate"));
  } else {
    spec.hazard = j.at("hazard").get<PiecewiseHazard>();
  }
  if (j.contains("covariates")) {
    for (const auto& c : j.at("covariates")) {
      spec.covariates.push_back(covariate_from_json(c));
    }
  }
  if (j.contains("beta")) spec.beta = j.at("beta").get<std::vector<double>>();
  if (j.contains("censoring")) {
    spec.censoring = censoring_from_json(j.at("censoring"));
  }
  spec.group = j.value("group", "");
  spec.id_prefix = j.value("id_prefix", "");
  spec.alive_state = j.value("alive_state", "alive");
  spec.event_state = j.value("event_state", "dead");
  // Not validated here: checks like clt_check override the subject count;
  // every consumer validates before simulating.
}

void to_json(nlohmann::json& j, const SimulationSpec& spec) {
  j = nlohmann::json{};
  j["subjects"] = spec.subjects;
  if (spec.multistate) {
    j["multistate"] = multistate_to_json(*spec.multistate);
  } else {
    j["hazard"] = spec.hazard;
  }
  if (!spec.covariates.empty()) {
    nlohmann::json columns = nlohmann::json::array();
    for (const auto& c : spec.covariates) columns.push_back(covariate_to_json(c));
    j["covariates"] = std::move(columns);
    j["beta"] = spec.beta;
  }
  j["censoring"] = censoring_to_json(spec.censoring);
  if (!spec.group.empty()) j["group"] = spec.group;
  if (!spec.id_prefix.empty()) j["id_prefix"] = spec.id_prefix;
  j["alive_state"] = spec.alive_state;
  j["event_state"] = spec.event_state;
}

namespace {

json run_martingale(const SimulationSpec& spec, const json& config) {
  MartingaleCheckConfig check;
  check.grid = config.at("grid").get<std::vector<double>>();
  check.replicates = config.at("replicates").get<int>();
  check.seed = config.value("seed", 0ULL);
  check.mean_flag_sigma = config.value("mean_flag_sigma", 4.0);
  check.ratio_low = config.value("ratio_low", 0.9);
  check.ratio_high = config.value("ratio_high", 1.1);
  check.min_compensator = config.value("min_compensator", 5.0);

  const auto report = martingale_check(spec, check);
  json points = json::array();
  for (const auto& point : report.points) {
    points.push_back({{"time", point.time},
                      {"mean_martingale", point.mean_martingale},
                      {"se_mean", point.se_mean},
                      {"var_martingale", point.var_martingale},
                      {"mean_predictable", point.mean_predictable},
                      {"mean_optional_grid", point.mean_optional_grid},
                      {"mean_optional_exact", point.mean_optional_exact},
                      {"mean_flag", point.mean_flag},
                      {"ratio_checked", point.ratio_checked},
                      {"ratio_flag", point.ratio_flag}});
  }
  return json{{"replicates", report.replicates},
              {"mean_flags", report.mean_flags},
              {"ratio_flags", report.ratio_flags},
              {"points", std::move(points)}};
}

json run_clt(const SimulationSpec& spec, const json& config) {
  CltConfig check;
  check.sample_sizes = config.at("sample_sizes").get<std::vector<int>>();
  check.replicates = config.at("replicates").get<int>();
  check.eval_times = config.at("eval_times").get<std::vector<double>>();
  check.max_jump_horizon = config.value("max_jump_horizon", 0.0);
  check.seed = config.value("seed", 0ULL);

  const std::string name = config.value("estimator", "nelson_aalen");
  CltEstimator estimator;
  if (name == "nelson_aalen") {
    estimator = CltEstimator::nelson_aalen;
  } else if (name == "kaplan_meier") {
    estimator = CltEstimator::kaplan_meier;
  } else if (name == "cox_score") {
    estimator = CltEstimator::cox_score;
  } else {
    throw bad_config("unknown estimator '" + name + "'");
  }

  const auto report = clt_check(spec, estimator, check);
  json per_n = json::array();
  for (const auto& sample : report.per_n) {
    json points = json::array();
    for (const auto& point : sample.points) {
      points.push_back({{"time", point.time},
                        {"mean_scaled_error", point.mean_scaled_error},
                        {"var_scaled_error", point.var_scaled_error},
                        {"limit_variance", point.limit_variance},
                        {"skewness", point.skewness},
                        {"excess_kurtosis", point.excess_kurtosis}});
    }
    json score_points = json::array();
    for (const auto& point : sample.score_points) {
      score_points.push_back(
          {{"time", point.time},
           {"covariance_rel_error", point.covariance_rel_error},
           {"skewness", point.skewness},
           {"excess_kurtosis", point.excess_kurtosis}});
    }
    per_n.push_back({{"n", sample.n},
                     {"mean_max_jump", sample.mean_max_jump},
                     {"points", std::move(points)},
                     {"score_points", std::move(score_points)}});
  }
  return json{{"estimator", name}, {"per_n", std::move(per_n)}};
}

json run_coverage(const SimulationSpec& spec, const json& config) {
  CoverageConfig check;
  check.time = config.at("time").get<double>();
  check.level = config.value("level", 0.95);
  check.replicates = config.at("replicates").get<int>();
  check.seed = config.value("seed", 0ULL);
  const std::string scale = config.value("scale", "transformed");
  if (scale == "transformed") {
    check.scale = CiScale::transformed;
  } else if (scale == "linear") {
    check.scale = CiScale::linear;
  } else {
    throw bad_config("unknown scale '" + scale + "'");
  }

  const std::string name = config.value("target", "nelson_aalen");
  CoverageTarget target;
  if (name == "nelson_aalen") {
    target = CoverageTarget::nelson_aalen;
  } else if (name == "kaplan_meier") {
    target = CoverageTarget::kaplan_meier;
  } else {
    throw bad_config("unknown coverage target '" + name + "'");
  }

  const auto report = coverage_check(spec, target, check);
  return json{{"target", name},       {"truth", report.truth},
              {"replicates", report.replicates},
              {"covered", report.covered},
              {"coverage", report.coverage},
              {"se", report.se}};
}

}  // namespace

nlohmann::json run_study(const nlohmann::json& config) {
  if (!config.is_object() || !config.contains("study")) {
    throw bad_config("missing 'study' field");
  }
  const std::string study = config.at("study").get<std::string>();
  if (study != "martingale_check" && study != "clt_check" &&
      study != "coverage_check") {
    throw bad_config("unknown study '" + study + "'");
  }
  const SimulationSpec spec = config.at("simulation").get<SimulationSpec>();

  json report;
  if (study == "martingale_check") {
    report = run_martingale(spec, config);
  } else if (study == "clt_check") {
    report = run_clt(spec, config);
  } else {
    report = run_coverage(spec, config);
  }

  json out;
  out["study"] = study;
  out["config"] = config;
  out["report"] = std::move(report);
  return out;
}

}  // namespace survkit::lab
