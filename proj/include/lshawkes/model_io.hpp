#pragma once

#include "lshawkes/model.hpp"

#include <json.hpp>

#include <string>

namespace lshawkes {

// Model specification document, shared by every CLI subcommand:
//
// {
//   "baseline": {
//     "form": "constant" | "sinusoidal" | "piecewise-linear" | "sampled-table",
//     "params": {...},                         // see Curve::from_json
//     "sup_bound": 1.5,                        // optional, default max of curve
//     "holder": {"beta": 1.0, "const": 3.2}    // optional, default exact slope
//   },
//   "fertility": {
//     "family": "zero" | "exponential" | "gamma-shape" | "sampled-table",
//     "zeta_curve": <curve or number>,
//     "params": {"decay": <curve or number>, "shape": 2, "ds": 0.1, "values": [...]},
//     "tail": {"d": 1.0, "const": 0.5},        // optional, default family envelope
//     "holder_envelope_l1": 2.0                // optional
//   },
//   "beta": 1.0
// }
LsHawkesModel model_from_json(const nlohmann::json& j);
nlohmann::json model_to_json(const LsHawkesModel& model);

LsHawkesModel load_model(const std::string& path);

} // namespace lshawkes
