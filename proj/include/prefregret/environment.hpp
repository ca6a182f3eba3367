#pragma once

#include <cstddef>
#include <string_view>

#include <json.hpp>

#include "prefregret/types.hpp"

namespace prefregret {

/// A planning problem with linear path features.
///
/// Implementations are immutable after construction and every query is
/// const, so one instance can be shared by concurrent trials.
class Environment {
 public:
  virtual ~Environment() = default;

  virtual std::string_view kind() const = 0;
  virtual std::size_t dimension() const = 0;
  virtual ObjectiveMode mode() const = 0;
  virtual const WeightBounds& bounds() const = 0;

  /// Optimal path for `w` (argmin cost, or argmax reward). Throws PlannerError.
  virtual Path optimal_path(const WeightVector& w) const = 0;
  /// Features recomputed from the path's states/controls.
  virtual FeatureVector compute_features(const Path& path) const = 0;

  /// Value subtracted from c(., w) before any ratio is formed. Zero in Cost
  /// mode; reward environments use it to make every candidate positive.
  virtual double reward_offset(const WeightVector& /*w*/) const { return 0.0; }

  virtual nlohmann::json scene_json() const = 0;
  virtual nlohmann::json path_json(const Path& path) const = 0;
};

}  // namespace prefregret
