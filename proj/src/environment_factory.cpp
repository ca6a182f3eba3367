#include "prefregret/environment_factory.hpp"

#include "prefregret/driver.hpp"
#include "prefregret/errors.hpp"
#include "prefregret/gridworld.hpp"

namespace prefregret {

namespace {

grid::GridMap resolve_map(const nlohmann::json& j) {
  if (j.is_object()) return grid::map_from_json(j);
  if (!j.is_string()) throw ConfigError("environment.map", "expected a builtin name, file path or object");
  const auto name = j.get<std::string>();
  if (name == "builtin:mobile") return grid::mobile_map();
  if (name.rfind("builtin:", 0) == 0) throw ConfigError("environment.map", "unknown builtin '" + name + "'");
  return grid::load_map(name);
}

driver::DriverScene resolve_scene(const nlohmann::json& spec) {
  const bool extended = spec.value("extended", false);
  const nlohmann::json j = spec.value("scene", nlohmann::json("builtin:standard"));
  if (j.is_object()) return driver::scene_from_json(j);
  if (!j.is_string()) throw ConfigError("environment.scene", "expected a builtin name, file path or object");
  const auto name = j.get<std::string>();
  if (name == "builtin:standard") {
    const int variant = spec.value("variant", 0);
    if (variant < 0) throw ConfigError("environment.variant", "must be non-negative");
    return driver::standard_scene(extended, variant);
  }
  if (name.rfind("builtin:", 0) == 0) throw ConfigError("environment.scene", "unknown builtin '" + name + "'");
  return driver::load_scene(name);
}

}  // namespace

std::shared_ptr<const Environment> make_environment(const nlohmann::json& spec) {
  if (!spec.is_object()) throw ConfigError("environment", "expected an object");
  try {
    const auto kind = spec.value("kind", std::string("gridworld"));
    if (kind == "gridworld") {
      grid::GridMap map = resolve_map(spec.value("map", nlohmann::json("builtin:mobile")));
      const auto task = spec.value("task", std::size_t{0});
      if (task >= map.tasks.size()) throw ConfigError("environment.task", "task index out of range");
      return std::make_shared<grid::GridEnvironment>(std::move(map), task);
    }
    if (kind == "driver") {
      driver::PlanOptions options;
      options.refine = spec.value("refine", true);
      return std::make_shared<driver::DriverEnvironment>(resolve_scene(spec), options);
    }
    throw ConfigError("environment.kind", "unknown environment kind '" + kind + "'");
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError("environment", e.what());
  } catch (const ContractViolation& e) {
    throw ConfigError("environment", e.what());
  }
}

}  // namespace prefregret
