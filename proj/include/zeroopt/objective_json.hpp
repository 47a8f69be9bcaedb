#pragma once

#include <json.hpp>

#include "zeroopt/oracles.hpp"

namespace zeroopt {

/// {"variant": name, "params": {...}, "seed": integer}. Matrices are
/// row-major nested arrays. UserAnalytic has no JSON form (ConfigError).
nlohmann::json objective_to_json(const ObjectiveSpec& spec);

/// Inverse of objective_to_json. Malformed documents raise ConfigError; a
/// well-formed spec that breaks an invariant raises InvalidArgument.
ObjectiveSpec objective_from_json(const nlohmann::json& doc);

}  // namespace zeroopt
