#include "prefregret/driver.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <string>

#include "prefregret/errors.hpp"
#include "prefregret/rng.hpp"

namespace prefregret::driver {

namespace {

constexpr double kBoundSlack = 1e-12;

struct Frame {
  double cos_h;
  double sin_h;
  double lateral(double x, double y) const { return -sin_h * x + cos_h * y; }
  double longitudinal(double x, double y) const { return cos_h * x + sin_h * y; }
};

void check_controls(const DriverScene& scene, std::span<const Control> controls) {
  if (controls.size() != static_cast<std::size_t>(scene.horizon - 1)) {
    throw ContractViolation("rollout: expected " + std::to_string(scene.horizon - 1) + " controls, got " +
                            std::to_string(controls.size()));
  }
  for (std::size_t t = 0; t < controls.size(); ++t) {
    if (!(std::abs(controls[t].steer) <= scene.max_steer + kBoundSlack) ||
        !(std::abs(controls[t].accel) <= scene.max_accel + kBoundSlack)) {
      throw ContractViolation("rollout: control " + std::to_string(t) + " outside actuation bounds");
    }
  }
}

void integrate(const DriverScene& scene, std::span<const Control> controls, std::vector<CarState>& states) {
  states.resize(static_cast<std::size_t>(scene.horizon));
  CarState s = scene.ego_start;
  states[0] = s;
  for (std::size_t t = 0; t < controls.size(); ++t) {
    s.x += s.speed * std::cos(s.heading) * scene.dt;
    s.y += s.speed * std::sin(s.heading) * scene.dt;
    s.heading += controls[t].steer * scene.dt;
    s.speed = std::max(0.0, s.speed + controls[t].accel * scene.dt);
    states[t + 1] = s;
  }
}

/// Single pass over states and controls; writes scene.dimension() or 4 entries.
void aggregate(const DriverScene& scene, std::span<const CarState> states, std::span<const Control> controls,
               bool extended, FeatureVector& out) {
  const Frame f{std::cos(scene.road_heading), std::sin(scene.road_heading)};
  const double n = static_cast<double>(states.size());
  double heading = 0.0, lane = 0.0, speed = 0.0, other = 0.0;
  double lateral_travel = 0.0, min_speed = std::numeric_limits<double>::infinity();
  double min_other = std::numeric_limits<double>::infinity();
  double prev_lat = 0.0;
  for (std::size_t t = 0; t < states.size(); ++t) {
    const CarState& s = states[t];
    heading += std::cos(s.heading - scene.road_heading);
    const double lat = f.lateral(s.x, s.y);
    double d_lane = std::numeric_limits<double>::infinity();
    for (double c : scene.lane_centers) d_lane = std::min(d_lane, std::abs(lat - c));
    lane += std::exp(-scene.lane_sharpness * d_lane * d_lane);
    const double dv = s.speed - scene.target_speed;
    speed += -dv * dv;
    const double ox = s.x - scene.other_vehicle[t].x;
    const double oy = s.y - scene.other_vehicle[t].y;
    const double d2 = ox * ox + oy * oy;
    other += -std::exp(-scene.other_sharpness * d2);
    if (t > 0) lateral_travel += std::abs(lat - prev_lat);
    prev_lat = lat;
    min_speed = std::min(min_speed, s.speed);
    min_other = std::min(min_other, std::sqrt(d2));
  }
  out = FeatureVector(extended ? 12 : 4);
  out[0] = heading / n;
  out[1] = lane / n;
  out[2] = speed / n;
  out[3] = other / n;
  if (!extended) return;

  double lat_sum = 0.0, lat_max = 0.0;
  for (std::size_t t = 0; t < controls.size(); ++t) {
    const double a = std::abs(states[t].speed * controls[t].steer);
    lat_sum += a * scene.dt;
    lat_max = std::max(lat_max, a);
  }
  double ang_sum = 0.0, ang_max = 0.0;
  for (std::size_t t = 1; t < controls.size(); ++t) {
    const double a = std::abs(controls[t].steer - controls[t - 1].steer) / scene.dt;
    ang_sum += a * scene.dt;
    ang_max = std::max(ang_max, a);
  }
  const CarState& first = states.front();
  const CarState& last = states.back();
  out[4] = f.longitudinal(last.x, last.y) - f.longitudinal(first.x, first.y);
  out[5] = lateral_travel;
  out[6] = lat_sum;
  out[7] = lat_max;
  out[8] = ang_sum;
  out[9] = ang_max;
  out[10] = min_speed;
  out[11] = min_other;
}

std::vector<Control> constant_controls(const DriverScene& scene, double steer, double accel) {
  return std::vector<Control>(static_cast<std::size_t>(scene.horizon - 1), Control{steer, accel});
}

/// Steer one way for `len` steps then back for `len` steps, starting at `from`.
std::vector<Control> lane_change(const DriverScene& scene, int from, int len, double steer, double accel) {
  std::vector<Control> u = constant_controls(scene, 0.0, accel);
  for (int k = 0; k < len; ++k) {
    const auto a = static_cast<std::size_t>(from + k);
    const auto b = static_cast<std::size_t>(from + len + k);
    if (a < u.size()) u[a].steer = steer;
    if (b < u.size()) u[b].steer = -steer;
  }
  return u;
}

double clamp(double v, double bound) { return std::clamp(v, -bound, bound); }

double reward_of(const DriverScene& scene, std::span<const Control> controls, const WeightVector& w,
                 std::vector<CarState>& states, FeatureVector& phi) {
  integrate(scene, controls, states);
  aggregate(scene, states, controls, scene.extended, phi);
  return dot(phi, w);
}

CarState state_from_json(const nlohmann::json& j) {
  if (j.is_array()) {
    if (j.size() != 4) throw ConfigError("ego_start", "expected [x, y, heading, speed]");
    return {j[0].get<double>(), j[1].get<double>(), j[2].get<double>(), j[3].get<double>()};
  }
  return {j.at("x").get<double>(), j.at("y").get<double>(), j.at("heading").get<double>(),
          j.at("speed").get<double>()};
}

}  // namespace

void DriverScene::validate() const {
  if (horizon < 2) throw ContractViolation("scene: horizon must be at least 2");
  if (!(dt > 0.0)) throw ContractViolation("scene: dt must be positive");
  if (lane_centers.empty()) throw ContractViolation("scene: no lanes");
  if (other_vehicle.size() != static_cast<std::size_t>(horizon)) {
    throw ContractViolation("scene: other_vehicle has " + std::to_string(other_vehicle.size()) +
                            " states, horizon is " + std::to_string(horizon));
  }
  if (!(lane_sharpness > 0.0) || !(other_sharpness > 0.0)) {
    throw ContractViolation("scene: feature sharpness must be positive");
  }
  if (!(max_steer > 0.0) || !(max_accel > 0.0)) throw ContractViolation("scene: actuation bounds must be positive");
  if (!(ego_start.speed >= 0.0)) throw ContractViolation("scene: negative start speed");
  if (candidate_count == 0) throw ContractViolation("scene: candidate count must be positive");
  bounds.validate();
  if (bounds.size() != dimension()) {
    throw ContractViolation("scene: bounds have " + std::to_string(bounds.size()) + " entries, expected " +
                            std::to_string(dimension()));
  }
}

Trajectory rollout(const DriverScene& scene, std::span<const Control> controls) {
  check_controls(scene, controls);
  Trajectory traj;
  traj.controls.assign(controls.begin(), controls.end());
  integrate(scene, controls, traj.states);
  return traj;
}

FeatureVector driver_features(const DriverScene& scene, const Trajectory& traj, bool extended) {
  if (traj.states.size() != static_cast<std::size_t>(scene.horizon) ||
      traj.controls.size() + 1 != traj.states.size()) {
    throw ContractViolation("driver features: trajectory does not match scene horizon");
  }
  FeatureVector phi;
  aggregate(scene, traj.states, traj.controls, extended, phi);
  return phi;
}

std::vector<Trajectory> sample_candidates(const DriverScene& scene, std::size_t n, std::uint64_t seed) {
  if (n == 0) throw ContractViolation("sample_candidates: n must be positive");
  const double ms = scene.max_steer;
  const double ma = scene.max_accel;
  std::vector<std::vector<Control>> library;
  library.push_back(constant_controls(scene, 0.0, 0.0));
  for (double a : {0.5 * ma, -0.5 * ma, ma, -ma}) library.push_back(constant_controls(scene, 0.0, a));
  const int steps = scene.horizon - 1;
  for (double a : {0.0, 0.5 * ma, -0.5 * ma}) {
    for (int len : {4, 6, 8, 10}) {
      for (int from : {0, steps / 4, steps / 2}) {
        if (from + 2 * len > steps) continue;
        for (double mag : {ms, 0.5 * ms}) {
          for (double dir : {1.0, -1.0}) library.push_back(lane_change(scene, from, len, dir * mag, a));
        }
      }
    }
  }

  std::vector<Trajectory> out;
  out.reserve(n);
  for (std::size_t i = 0; i < library.size() && out.size() < n; ++i) out.push_back(rollout(scene, library[i]));

  Rng rng(seed);
  while (out.size() < n) {
    std::vector<Control> u;
    if (rng.uniform() < 0.5) {
      // perturbed maneuver
      u = library[rng.index(library.size())];
      for (Control& c : u) {
        c.steer = clamp(c.steer + 0.3 * ms * rng.normal(), ms);
        c.accel = clamp(c.accel + 0.3 * ma * rng.normal(), ma);
      }
    } else {
      // piecewise-constant random controls
      u = constant_controls(scene, 0.0, 0.0);
      const std::size_t segments = 1 + rng.index(4);
      for (std::size_t s = 0; s < segments; ++s) {
        const double steer = rng.uniform(-ms, ms);
        const double accel = rng.uniform(-ma, ma);
        const std::size_t lo = u.size() * s / segments;
        const std::size_t hi = u.size() * (s + 1) / segments;
        for (std::size_t t = lo; t < hi; ++t) u[t] = {steer, accel};
      }
    }
    out.push_back(rollout(scene, u));
  }
  return out;
}

Trajectory driver_optimal_path(const DriverScene& scene, const WeightVector& w,
                               std::span<const Trajectory> candidates, PlanOptions options) {
  if (candidates.empty()) throw ContractViolation("driver planner: empty candidate set");
  if (w.size() != scene.dimension()) throw ContractViolation("driver planner: weight dimension mismatch");
  std::size_t best = 0;
  double best_reward = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < candidates.size(); ++i) {
    const double r = dot(driver_features(scene, candidates[i], scene.extended), w);
    if (r > best_reward) {
      best_reward = r;
      best = i;
    }
  }
  if (!options.refine) return candidates[best];

  std::vector<Control> u = candidates[best].controls;
  std::vector<CarState> states;
  FeatureVector phi;
  double steps[2] = {0.25 * scene.max_steer, 0.25 * scene.max_accel};
  const double bound[2] = {scene.max_steer, scene.max_accel};
  for (int it = 0; it < options.refine_iterations; ++it) {
    bool improved = false;
    for (std::size_t t = 0; t < u.size(); ++t) {
      for (int c = 0; c < 2; ++c) {
        double& slot = c == 0 ? u[t].steer : u[t].accel;
        const double original = slot;
        for (double sign : {1.0, -1.0}) {
          const double trial = clamp(original + sign * steps[c], bound[c]);
          if (trial == original) continue;
          slot = trial;
          const double r = reward_of(scene, u, w, states, phi);
          if (r > best_reward) {
            best_reward = r;
            improved = true;
            break;
          }
          slot = original;
        }
      }
    }
    if (!improved) {
      steps[0] *= 0.5;
      steps[1] *= 0.5;
    }
  }
  return rollout(scene, u);
}

DriverScene scene_from_json(const nlohmann::json& j) {
  DriverScene s;
  try {
    s.lane_centers = j.at("lanes").get<std::vector<double>>();
    s.dt = j.at("dt").get<double>();
    s.horizon = j.at("horizon").get<int>();
    s.ego_start = state_from_json(j.at("ego_start"));
    s.other_vehicle.clear();
    for (const auto& p : j.at("other_vehicle")) {
      if (!p.is_array() || p.size() != 2) throw ConfigError("other_vehicle", "expected [x, y] entries");
      s.other_vehicle.push_back({p[0].get<double>(), p[1].get<double>()});
    }
    s.target_speed = j.at("target_speed").get<double>();
    s.road_heading = j.value("road_heading", 0.0);
    s.lane_sharpness = j.value("beta", 4.0);
    s.other_sharpness = j.value("gamma", 1.0);
    s.max_steer = j.value("max_steer", 1.0);
    s.max_accel = j.value("max_accel", 2.0);
    s.extended = j.value("extended", false);
    if (j.contains("candidates")) {
      s.candidate_count = j.at("candidates").value("count", std::size_t{500});
      s.candidate_seed = j.at("candidates").value("seed", std::uint64_t{1});
    }
    if (j.contains("bounds")) {
      s.bounds.lower = WeightVector(j.at("bounds").at("lower").get<std::vector<double>>());
      s.bounds.upper = WeightVector(j.at("bounds").at("upper").get<std::vector<double>>());
    } else {
      s.bounds = WeightBounds::box(s.dimension(), -1.0, 1.0);
    }
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError("scene", e.what());
  }
  s.validate();
  return s;
}

nlohmann::json scene_to_json(const DriverScene& s) {
  nlohmann::json other = nlohmann::json::array();
  for (const Point& p : s.other_vehicle) other.push_back({p.x, p.y});
  return {
      {"lanes", s.lane_centers},
      {"dt", s.dt},
      {"horizon", s.horizon},
      {"ego_start", {s.ego_start.x, s.ego_start.y, s.ego_start.heading, s.ego_start.speed}},
      {"other_vehicle", other},
      {"target_speed", s.target_speed},
      {"road_heading", s.road_heading},
      {"beta", s.lane_sharpness},
      {"gamma", s.other_sharpness},
      {"max_steer", s.max_steer},
      {"max_accel", s.max_accel},
      {"extended", s.extended},
      {"candidates", {{"count", s.candidate_count}, {"seed", s.candidate_seed}}},
      {"bounds", {{"lower", s.bounds.lower.values()}, {"upper", s.bounds.upper.values()}}},
  };
}

DriverScene load_scene(const std::string& file) {
  std::ifstream in(file);
  if (!in) throw ConfigError("scene", "cannot open " + file);
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError("scene", file + ": " + e.what());
  }
  return scene_from_json(j);
}

nlohmann::json trajectory_to_json(const Trajectory& traj) {
  nlohmann::json states = nlohmann::json::array();
  for (const CarState& s : traj.states) states.push_back({s.x, s.y, s.heading, s.speed});
  nlohmann::json controls = nlohmann::json::array();
  for (const Control& c : traj.controls) controls.push_back({c.steer, c.accel});
  return {{"states", states}, {"controls", controls}};
}

DriverScene standard_scene(bool extended, int variant) {
  struct OtherStart {
    double x, y, speed;
  };
  // variant 0 is the training scene; the others move the other vehicle's start.
  static constexpr OtherStart kStarts[] = {
      {0.9, 0.0, 0.5}, {0.4, 0.0, 0.6}, {0.6, 1.0, 0.4}, {1.2, -1.0, 0.3}, {1.6, 0.0, 0.2}, {-0.4, 1.0, 1.1},
  };
  const OtherStart o = kStarts[static_cast<std::size_t>(variant) % std::size(kStarts)];
  DriverScene s;
  s.extended = extended;
  s.other_vehicle.clear();
  for (int t = 0; t < s.horizon; ++t) s.other_vehicle.push_back({o.x + o.speed * s.dt * t, o.y});
  s.bounds = WeightBounds::box(s.dimension(), -1.0, 1.0);
  s.validate();
  return s;
}

DriverEnvironment::DriverEnvironment(DriverScene scene, PlanOptions options)
    : scene_(std::move(scene)), options_(options) {
  scene_.validate();
  candidates_ = sample_candidates(scene_, scene_.candidate_count, scene_.candidate_seed);
  candidate_features_.reserve(candidates_.size());
  for (const Trajectory& t : candidates_) candidate_features_.push_back(driver_features(scene_, t, scene_.extended));
}

Path DriverEnvironment::to_path(const Trajectory& traj) const {
  Path p;
  p.states.reserve(traj.states.size());
  for (const CarState& s : traj.states) p.states.push_back({s.x, s.y, s.heading, s.speed});
  p.controls.reserve(2 * traj.controls.size());
  for (const Control& c : traj.controls) {
    p.controls.push_back(c.steer);
    p.controls.push_back(c.accel);
  }
  p.features = driver_features(scene_, traj, scene_.extended);
  return p;
}

std::vector<Control> DriverEnvironment::controls_of(const Path& path) {
  if (path.controls.size() % 2 != 0) throw ContractViolation("driver path: odd control vector length");
  std::vector<Control> u(path.controls.size() / 2);
  for (std::size_t t = 0; t < u.size(); ++t) u[t] = {path.controls[2 * t], path.controls[2 * t + 1]};
  return u;
}

Path DriverEnvironment::optimal_path(const WeightVector& w) const {
  Path p = to_path(driver_optimal_path(scene_, w, candidates_, options_));
  p.optimal_for = w;
  return p;
}

FeatureVector DriverEnvironment::compute_features(const Path& path) const {
  return driver_features(scene_, rollout(scene_, controls_of(path)), scene_.extended);
}

double DriverEnvironment::reward_offset(const WeightVector& w) const {
  double lo = std::numeric_limits<double>::infinity();
  double hi = -std::numeric_limits<double>::infinity();
  for (const FeatureVector& phi : candidate_features_) {
    const double r = dot(phi, w);
    lo = std::min(lo, r);
    hi = std::max(hi, r);
  }
  return lo - (1e-6 * (hi - lo) + 1e-12);
}

nlohmann::json DriverEnvironment::scene_json() const {
  nlohmann::json j = scene_to_json(scene_);
  j["kind"] = "driver";
  return j;
}

nlohmann::json DriverEnvironment::path_json(const Path& path) const {
  return trajectory_to_json(rollout(scene_, controls_of(path)));
}

}  // namespace prefregret::driver
