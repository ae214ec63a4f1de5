#pragma once

#include <json.hpp>

#include "survkit/lab.hpp"

namespace survkit::lab {

// JSON bindings for the simulation specs and check reports.
void from_json(const nlohmann::json& j, PiecewiseHazard& hazard);
void to_json(nlohmann::json& j, const PiecewiseHazard& hazard);
void from_json(const nlohmann::json& j, SimulationSpec& spec);
void to_json(nlohmann::json& j, const SimulationSpec& spec);

// Runs one declarative study configuration:
//   {"study": "martingale_check" | "clt_check" | "coverage_check",
//    "seed": ..., "replicates": ..., "simulation": {...}, ...}
// and returns the report together with an echo of the configuration.
nlohmann::json run_study(const nlohmann::json& config);

}  // namespace survkit::lab
