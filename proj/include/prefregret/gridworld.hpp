#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include <json.hpp>

#include "prefregret/environment.hpp"

namespace prefregret::grid {

struct Cell {
  int x = 0;
  int y = 0;
  bool operator==(const Cell&) const = default;
  auto operator<=>(const Cell&) const = default;
};

struct Region {
  int id = 0;
  std::vector<Cell> cells;
};

struct Task {
  Cell start;
  Cell goal;
};

/// 4-connected lattice with user-marked regions. Feature i < n is the length
/// travelled inside region i (cells entered, start included, times
/// `cell_length`); feature n is the duration (moves times `step_time`).
struct GridMap {
  int width = 0;
  int height = 0;
  double step_time = 1.0;
  double cell_length = 1.0;
  std::vector<Region> regions;
  /// tasks[0] is the map's primary start/goal pair.
  std::vector<Task> tasks;
  WeightBounds bounds;

  std::size_t dimension() const noexcept { return regions.size() + 1; }
  bool in_bounds(Cell c) const noexcept { return c.x >= 0 && c.y >= 0 && c.x < width && c.y < height; }
  int index(Cell c) const noexcept { return c.y * width + c.x; }

  /// Throws ContractViolation describing the first broken invariant,
  /// including the positive-stage-cost guard over the whole bounds box.
  void validate() const;
};

using LatticePath = std::vector<Cell>;

FeatureVector grid_features(const GridMap& map, const LatticePath& path);

struct GridPlan {
  LatticePath path;
  /// Stage costs summed along the path during search.
  double accumulated_cost = 0.0;
};

/// Exact minimum-cost simple path (Dijkstra over strictly positive stage costs).
GridPlan grid_optimal_path(const GridMap& map, const WeightVector& w, std::size_t task = 0);

/// All simple start-goal paths; throws OracleScaleError past `cap`.
std::vector<LatticePath> enumerate_paths(const GridMap& map, std::size_t cap, std::size_t task = 0);

/// Checks adjacency, simplicity, bounds and endpoints; throws ContractViolation.
void validate_path(const GridMap& map, const LatticePath& path, std::size_t task);

GridMap map_from_json(const nlohmann::json& j);
nlohmann::json map_to_json(const GridMap& map);
GridMap load_map(const std::string& file);

/// Built-in 18-region map used by the Mobile experiments (three tasks).
GridMap mobile_map();

class GridEnvironment final : public Environment {
 public:
  explicit GridEnvironment(GridMap map, std::size_t task = 0);

  std::string_view kind() const override { return "gridworld"; }
  std::size_t dimension() const override { return map_.dimension(); }
  ObjectiveMode mode() const override { return ObjectiveMode::Cost; }
  const WeightBounds& bounds() const override { return map_.bounds; }
  Path optimal_path(const WeightVector& w) const override;
  FeatureVector compute_features(const Path& path) const override;
  nlohmann::json scene_json() const override;
  nlohmann::json path_json(const Path& path) const override;

  const GridMap& map() const noexcept { return map_; }
  std::size_t task() const noexcept { return task_; }

  Path to_path(const LatticePath& cells) const;
  static LatticePath to_cells(const Path& path);

 private:
  GridMap map_;
  std::size_t task_;
};

}  // namespace prefregret::grid
