#pragma once

#include <iosfwd>
#include <string>

#include "cadlag/models.hpp"
#include "cadlag/step_function.hpp"
#include "json.hpp"

namespace cadlag {

/// {"dim": d, "initial": [...], "jumps": [{"t": t, "v": [...]}, ...]}
nlohmann::json to_json(const StepFunction& f);

/// Inverse of to_json. Throws std::invalid_argument on malformed input.
StepFunction step_function_from_json(const nlohmann::json& j);

StepFunction read_step_function(const std::string& path);

/// Model fields by name ("kind", "alpha", "q", "sre_dim", "n", "seed",
/// "burn_in", "sre_a_upper", "sre_unit_b"); absent keys keep the defaults.
ModelConfig model_config_from_json(const nlohmann::json& j);
nlohmann::json to_json(const ModelConfig& c);

/// One line per observation, d comma-separated columns, %.17g.
void write_sample_csv(std::ostream& out, const Sample& s);

/// {"model": {...}, "dim": d, "n": n, "rows": [[...], ...]}
nlohmann::json to_json(const Sample& s);

}  // namespace cadlag
