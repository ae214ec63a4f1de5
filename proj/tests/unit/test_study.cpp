#include <doctest.h>

#include "survkit/study.hpp"

using namespace survkit;
using nlohmann::json;

TEST_CASE("simulation specs round trip through JSON") {
  const json j = {
      {"subjects", 25},
      {"hazard", {{"breakpoints", {0.0, 1.0}}, {"levels", {0.5, 1.5}}}},
      {"covariates",
       {{{"kind", "bernoulli"}, {"prob", 0.4}, {"name", "arm"}},
        {{"kind", "normal"}, {"mean", 0.0}, {"sd", 2.0}}}},
      {"beta", {0.3, -0.2}},
      {"censoring",
       {{"scheme", "random"},
        {"hazard", {{"breakpoints", {0.0}}, {"levels", {0.25}}}}}},
      {"group", "treated"},
  };
  const auto spec = j.get<lab::SimulationSpec>();
  CHECK(spec.subjects == 25);
  CHECK(spec.hazard.levels == std::vector<double>{0.5, 1.5});
  CHECK(spec.covariates.size() == 2);
  CHECK(spec.covariates[0].kind == lab::CovariateColumn::Kind::bernoulli);
  CHECK(spec.censoring.scheme == lab::CensoringSpec::Scheme::random);

  const json back = spec;
  const auto again = back.get<lab::SimulationSpec>();
  CHECK(json(again) == back);
}

TEST_CASE("constant hazards have a numeric shorthand") {
  const json j = {{"subjects", 3}, {"hazard", 1.5}};
  const auto spec = j.get<lab::SimulationSpec>();
  CHECK(spec.hazard.levels == std::vector<double>{1.5});
}

TEST_CASE("run_study handles a small martingale check deterministically") {
  const json config = {
      {"study", "martingale_check"},
      {"seed", 5},
      {"replicates", 200},
      {"grid", {0.5, 1.0}},
      {"simulation", {{"subjects", 40}, {"hazard", 1.0}}},
  };
  const auto a = lab::run_study(config);
  const auto b = lab::run_study(config);
  CHECK(a.dump() == b.dump());
  CHECK(a.at("report").at("points").size() == 2);
  CHECK(a.at("config").at("seed").get<int>() == 5);
}

TEST_CASE("run_study coverage and clt smoke") {
  const json coverage = {
      {"study", "coverage_check"},
      {"seed", 9},
      {"replicates", 300},
      {"time", 1.0},
      {"level", 0.9},
      {"target", "nelson_aalen"},
      {"simulation", {{"subjects", 60}, {"hazard", 0.5}}},
  };
  const auto report = lab::run_study(coverage);
  const double got = report.at("report").at("coverage").get<double>();
  CHECK(got > 0.6);
  CHECK(got <= 1.0);

  const json clt = {
      {"study", "clt_check"},
      {"seed", 10},
      {"replicates", 100},
      {"estimator", "nelson_aalen"},
      {"sample_sizes", {50}},
      {"eval_times", {0.5}},
      {"simulation", {{"subjects", 0}, {"hazard", 1.0}}},
  };
  const auto clt_report = lab::run_study(clt);
  CHECK(clt_report.at("report").at("per_n").size() == 1);
}

TEST_CASE("unknown studies and malformed configs are rejected") {
  CHECK_THROWS_AS(lab::run_study(json{{"study", "bogus"}}), Error);
  CHECK_THROWS_AS(lab::run_study(json::array()), Error);
  const json missing_sim = {{"study", "martingale_check"}};
  CHECK_THROWS_AS(lab::run_study(missing_sim), json::exception);
}
