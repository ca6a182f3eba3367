#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "prefregret/environment.hpp"

namespace prefregret::driver {

/// x, y (m), heading (rad), speed (m/s).
struct CarState {
  double x = 0.0;
  double y = 0.0;
  double heading = 0.0;
  double speed = 0.0;
};

/// Steering rate (rad/s) and acceleration (m/s^2).
struct Control {
  double steer = 0.0;
  double accel = 0.0;
};

struct Point {
  double x = 0.0;
  double y = 0.0;
};

/// Straight multi-lane road with one other vehicle on a fixed trajectory.
struct DriverScene {
  std::vector<double> lane_centers{-1.0, 0.0, 1.0};
  double road_heading = 0.0;
  std::vector<Point> other_vehicle;
  int horizon = 25;
  double dt = 0.1;
  CarState ego_start{0.0, 0.0, 0.0, 1.0};
  double target_speed = 1.0;
  double lane_sharpness = 4.0;   // beta
  double other_sharpness = 1.0;  // gamma
  double max_steer = 1.0;
  double max_accel = 2.0;
  bool extended = false;
  std::size_t candidate_count = 500;
  std::uint64_t candidate_seed = 1;
  WeightBounds bounds;

  std::size_t dimension() const noexcept { return extended ? 12 : 4; }
  void validate() const;
};

struct Trajectory {
  std::vector<Control> controls;  // horizon - 1
  std::vector<CarState> states;   // horizon
};

/// Unicycle integration; throws ContractViolation on out-of-bound controls.
Trajectory rollout(const DriverScene& scene, std::span<const Control> controls);

FeatureVector driver_features(const DriverScene& scene, const Trajectory& traj, bool extended);

/// Structured maneuver library (lane keep first) followed by random
/// perturbations; deterministic in the seed.
std::vector<Trajectory> sample_candidates(const DriverScene& scene, std::size_t n,
                                          std::uint64_t seed);

struct PlanOptions {
  bool refine = true;
  int refine_iterations = 50;
};

/// Reward argmax over the candidates, then coordinate-wise hill climbing.
Trajectory driver_optimal_path(const DriverScene& scene, const WeightVector& w,
                               std::span<const Trajectory> candidates, PlanOptions options = {});

DriverScene scene_from_json(const nlohmann::json& j);
nlohmann::json scene_to_json(const DriverScene& scene);
DriverScene load_scene(const std::string& file);
nlohmann::json trajectory_to_json(const Trajectory& traj);

/// Built-in three-lane scene. `variant` > 0 shifts the other vehicle's start
/// state, giving the test scenes of the generalization study.
DriverScene standard_scene(bool extended = false, int variant = 0);

class DriverEnvironment final : public Environment {
 public:
  explicit DriverEnvironment(DriverScene scene, PlanOptions options = {});

  std::string_view kind() const override { return "driver"; }
  std::size_t dimension() const override { return scene_.dimension(); }
  ObjectiveMode mode() const override { return ObjectiveMode::Reward; }
  const WeightBounds& bounds() const override { return scene_.bounds; }
  Path optimal_path(const WeightVector& w) const override;
  FeatureVector compute_features(const Path& path) const override;
  double reward_offset(const WeightVector& w) const override;
  nlohmann::json scene_json() const override;
  nlohmann::json path_json(const Path& path) const override;

  const DriverScene& scene() const noexcept { return scene_; }
  const std::vector<Trajectory>& candidates() const noexcept { return candidates_; }
  const std::vector<FeatureVector>& candidate_features() const noexcept { return candidate_features_; }

  Path to_path(const Trajectory& traj) const;
  static std::vector<Control> controls_of(const Path& path);

 private:
  DriverScene scene_;
  PlanOptions options_;
  std::vector<Trajectory> candidates_;
  std::vector<FeatureVector> candidate_features_;
};

}  // namespace prefregret::driver
