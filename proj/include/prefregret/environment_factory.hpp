#pragma once

#include <memory>

#include <json.hpp>

#include "prefregret/environment.hpp"

namespace prefregret {

/// Builds an environment from a JSON description:
///   {"kind": "gridworld", "map": "builtin:mobile" | <file> | {...}, "task": 0}
///   {"kind": "driver", "scene": "builtin:standard" | <file> | {...},
///    "extended": false, "variant": 0, "refine": true}
/// Throws ConfigError naming the offending field.
std::shared_ptr<const Environment> make_environment(const nlohmann::json& spec);

}  // namespace prefregret
