#include "prefregret/gridworld.hpp"

#include <algorithm>
#include <fstream>
#include <functional>
#include <limits>
#include <queue>
#include <set>
#include <string>

#include "prefregret/errors.hpp"

namespace prefregret::grid {

namespace {

constexpr double kMinTimeWeight = 0.05;
constexpr Cell kMoves[4] = {{1, 0}, {-1, 0}, {0, 1}, {0, -1}};

std::string cell_str(Cell c) { return "(" + std::to_string(c.x) + "," + std::to_string(c.y) + ")"; }

/// Region indices covering each cell, indexed by GridMap::index.
std::vector<std::vector<int>> membership(const GridMap& map) {
  std::vector<std::vector<int>> cover(static_cast<std::size_t>(map.width * map.height));
  for (std::size_t r = 0; r < map.regions.size(); ++r) {
    for (Cell c : map.regions[r].cells) {
      if (!map.in_bounds(c)) continue;
      auto& list = cover[static_cast<std::size_t>(map.index(c))];
      if (list.empty() || list.back() != static_cast<int>(r)) list.push_back(static_cast<int>(r));
    }
  }
  return cover;
}

void check_walk(const GridMap& map, const LatticePath& path) {
  if (path.empty()) throw ContractViolation("lattice path is empty");
  std::set<Cell> seen;
  for (std::size_t k = 0; k < path.size(); ++k) {
    if (!map.in_bounds(path[k])) throw ContractViolation("cell " + cell_str(path[k]) + " out of bounds");
    if (!seen.insert(path[k]).second) throw ContractViolation("cell " + cell_str(path[k]) + " repeated");
    if (k > 0 && std::abs(path[k].x - path[k - 1].x) + std::abs(path[k].y - path[k - 1].y) != 1) {
      throw ContractViolation("cells " + cell_str(path[k - 1]) + " and " + cell_str(path[k]) +
                              " are not adjacent");
    }
  }
}

FeatureVector features_with(const GridMap& map, const std::vector<std::vector<int>>& cover,
                            const LatticePath& path) {
  FeatureVector phi(map.dimension());
  for (Cell c : path) {
    for (int r : cover[static_cast<std::size_t>(map.index(c))]) phi[static_cast<std::size_t>(r)] += 1.0;
  }
  for (std::size_t r = 0; r < map.regions.size(); ++r) phi[r] *= map.cell_length;
  phi[map.regions.size()] = static_cast<double>(path.size() - 1) * map.step_time;
  return phi;
}

GridPlan plan_with(const GridMap& map, const std::vector<std::vector<int>>& cover,
                   const WeightVector& w, std::size_t task) {
  if (w.size() != map.dimension()) throw ContractViolation("grid planner: weight dimension mismatch");
  if (task >= map.tasks.size()) throw ContractViolation("grid planner: no such task");
  const std::size_t cells = static_cast<std::size_t>(map.width * map.height);
  const double move = map.step_time * w[map.regions.size()];

  // Cost of entering each cell; strictly positive or the search is unsound.
  std::vector<double> enter(cells);
  std::vector<double> region_cost(cells);
  for (std::size_t i = 0; i < cells; ++i) {
    double s = 0.0;
    for (int r : cover[i]) s += w[static_cast<std::size_t>(r)];
    region_cost[i] = s * map.cell_length;
    enter[i] = move + region_cost[i];
    if (!(enter[i] > 0.0)) {
      throw PlannerError("grid planner: non-positive stage cost at cell " +
                         cell_str({static_cast<int>(i) % map.width, static_cast<int>(i) / map.width}));
    }
  }

  const Cell start = map.tasks[task].start;
  const Cell goal = map.tasks[task].goal;
  const auto s_idx = static_cast<std::size_t>(map.index(start));
  const auto g_idx = static_cast<std::size_t>(map.index(goal));
  constexpr double kInf = std::numeric_limits<double>::infinity();
  constexpr std::size_t kNone = std::numeric_limits<std::size_t>::max();
  std::vector<double> dist(cells, kInf);
  std::vector<std::size_t> prev(cells, kNone);
  std::vector<char> done(cells, 0);
  using Entry = std::pair<double, std::size_t>;
  std::priority_queue<Entry, std::vector<Entry>, std::greater<>> open;
  dist[s_idx] = region_cost[s_idx];
  open.push({dist[s_idx], s_idx});
  while (!open.empty()) {
    const auto [d, u] = open.top();
    open.pop();
    if (done[u]) continue;
    done[u] = 1;
    if (u == g_idx) break;
    const Cell cu{static_cast<int>(u) % map.width, static_cast<int>(u) / map.width};
    for (Cell m : kMoves) {
      const Cell cv{cu.x + m.x, cu.y + m.y};
      if (!map.in_bounds(cv)) continue;
      const auto v = static_cast<std::size_t>(map.index(cv));
      const double nd = d + enter[v];
      if (nd < dist[v]) {
        dist[v] = nd;
        prev[v] = u;
        open.push({nd, v});
      }
    }
  }
  if (!done[g_idx]) throw PlannerError("grid planner: goal " + cell_str(goal) + " unreachable");

  GridPlan plan;
  plan.accumulated_cost = dist[g_idx];
  for (std::size_t v = g_idx; v != kNone; v = prev[v]) {
    plan.path.push_back({static_cast<int>(v) % map.width, static_cast<int>(v) / map.width});
  }
  std::reverse(plan.path.begin(), plan.path.end());
  return plan;
}

Cell cell_from_json(const nlohmann::json& j) {
  if (!j.is_array() || j.size() != 2) throw ConfigError("cell", "expected [x, y]");
  return {j.at(0).get<int>(), j.at(1).get<int>()};
}

nlohmann::json cell_to_json(Cell c) { return nlohmann::json::array({c.x, c.y}); }

}  // namespace

void GridMap::validate() const {
  if (width <= 0 || height <= 0) throw ContractViolation("map: width and height must be positive");
  if (!(step_time > 0.0) || !(cell_length > 0.0)) {
    throw ContractViolation("map: step_time and cell_length must be positive");
  }
  if (tasks.empty()) throw ContractViolation("map: no start/goal task");
  for (const Task& t : tasks) {
    if (!in_bounds(t.start) || !in_bounds(t.goal)) throw ContractViolation("map: start or goal out of bounds");
    if (t.start == t.goal) throw ContractViolation("map: start equals goal " + cell_str(t.start));
  }
  std::set<int> ids;
  for (const Region& r : regions) {
    if (r.cells.empty()) throw ContractViolation("map: region " + std::to_string(r.id) + " has no cells");
    if (!ids.insert(r.id).second) throw ContractViolation("map: duplicate region id " + std::to_string(r.id));
    for (Cell c : r.cells) {
      if (!in_bounds(c)) {
        throw ContractViolation("map: region " + std::to_string(r.id) + " cell " + cell_str(c) +
                                " out of bounds");
      }
    }
  }
  bounds.validate();
  if (bounds.size() != dimension()) {
    throw ContractViolation("map: bounds have " + std::to_string(bounds.size()) + " entries, expected " +
                            std::to_string(dimension()));
  }
  const std::size_t time = regions.size();
  if (bounds.lower[time] < kMinTimeWeight) {
    throw ContractViolation("map: time weight lower bound must be at least 0.05");
  }
  // Worst case over the box is the lower corner, since all feature increments are nonnegative.
  const auto cover = membership(*this);
  std::vector<double> region_low(cover.size(), 0.0);
  double min_stage = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < cover.size(); ++i) {
    for (int r : cover[i]) region_low[i] += bounds.lower[static_cast<std::size_t>(r)] * cell_length;
    min_stage = std::min(min_stage, step_time * bounds.lower[time] + region_low[i]);
  }
  if (!(min_stage > 0.0)) throw ContractViolation("map: bounds admit a non-positive stage cost");
  for (const Task& t : tasks) {
    if (!(region_low[static_cast<std::size_t>(index(t.start))] + min_stage > 0.0)) {
      throw ContractViolation("map: bounds admit a non-positive optimal cost from " + cell_str(t.start));
    }
  }
}

FeatureVector grid_features(const GridMap& map, const LatticePath& path) {
  check_walk(map, path);
  return features_with(map, membership(map), path);
}

void validate_path(const GridMap& map, const LatticePath& path, std::size_t task) {
  check_walk(map, path);
  if (task >= map.tasks.size()) throw ContractViolation("no such task");
  if (path.front() != map.tasks[task].start || path.back() != map.tasks[task].goal) {
    throw ContractViolation("lattice path does not join the task's start and goal");
  }
}

GridPlan grid_optimal_path(const GridMap& map, const WeightVector& w, std::size_t task) {
  return plan_with(map, membership(map), w, task);
}

std::vector<LatticePath> enumerate_paths(const GridMap& map, std::size_t cap, std::size_t task) {
  if (task >= map.tasks.size()) throw ContractViolation("no such task");
  const Cell goal = map.tasks[task].goal;
  std::vector<LatticePath> out;
  std::vector<char> visited(static_cast<std::size_t>(map.width * map.height), 0);
  LatticePath current{map.tasks[task].start};
  visited[static_cast<std::size_t>(map.index(current.front()))] = 1;

  std::function<void()> extend = [&]() {
    const Cell c = current.back();
    if (c == goal) {
      if (out.size() >= cap) {
        throw OracleScaleError("enumerate_paths: more than " + std::to_string(cap) + " simple paths");
      }
      out.push_back(current);
      return;
    }
    for (Cell m : kMoves) {
      const Cell n{c.x + m.x, c.y + m.y};
      if (!map.in_bounds(n)) continue;
      auto& v = visited[static_cast<std::size_t>(map.index(n))];
      if (v) continue;
      v = 1;
      current.push_back(n);
      extend();
      current.pop_back();
      v = 0;
    }
  };
  extend();
  return out;
}

GridMap map_from_json(const nlohmann::json& j) {
  GridMap map;
  try {
    map.width = j.at("width").get<int>();
    map.height = j.at("height").get<int>();
    map.step_time = j.at("step_time").get<double>();
    map.cell_length = j.value("cell_length", 1.0);
    map.tasks.push_back({cell_from_json(j.at("start")), cell_from_json(j.at("goal"))});
    if (j.contains("tasks")) {
      for (const auto& t : j.at("tasks")) {
        Task task{cell_from_json(t.at("start")), cell_from_json(t.at("goal"))};
        if (task.start == map.tasks[0].start && task.goal == map.tasks[0].goal) continue;
        map.tasks.push_back(task);
      }
    }
    for (const auto& r : j.at("regions")) {
      Region region;
      region.id = r.at("id").get<int>();
      for (const auto& c : r.at("cells")) region.cells.push_back(cell_from_json(c));
      map.regions.push_back(std::move(region));
    }
    if (j.contains("bounds")) {
      map.bounds.lower = WeightVector(j.at("bounds").at("lower").get<std::vector<double>>());
      map.bounds.upper = WeightVector(j.at("bounds").at("upper").get<std::vector<double>>());
    } else {
      map.bounds = WeightBounds::box(map.dimension(), 0.0, 1.0);
      map.bounds.lower[map.regions.size()] = kMinTimeWeight;
    }
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError("map", e.what());
  }
  map.validate();
  return map;
}

nlohmann::json map_to_json(const GridMap& map) {
  nlohmann::json j;
  j["width"] = map.width;
  j["height"] = map.height;
  j["step_time"] = map.step_time;
  j["cell_length"] = map.cell_length;
  j["start"] = cell_to_json(map.tasks.at(0).start);
  j["goal"] = cell_to_json(map.tasks.at(0).goal);
  j["tasks"] = nlohmann::json::array();
  for (const Task& t : map.tasks) {
    j["tasks"].push_back({{"start", cell_to_json(t.start)}, {"goal", cell_to_json(t.goal)}});
  }
  j["regions"] = nlohmann::json::array();
  for (const Region& r : map.regions) {
    nlohmann::json cells = nlohmann::json::array();
    for (Cell c : r.cells) cells.push_back(cell_to_json(c));
    j["regions"].push_back({{"id", r.id}, {"cells", cells}});
  }
  j["bounds"] = {{"lower", map.bounds.lower.values()}, {"upper", map.bounds.upper.values()}};
  return j;
}

GridMap load_map(const std::string& file) {
  std::ifstream in(file);
  if (!in) throw ConfigError("map", "cannot open " + file);
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError("map", file + ": " + e.what());
  }
  return map_from_json(j);
}

GridMap mobile_map() {
  GridMap map;
  map.width = 13;
  map.height = 11;
  map.step_time = 12.0;
  map.cell_length = 40.0;
  map.tasks = {{{0, 5}, {12, 5}}, {{0, 0}, {12, 10}}, {{0, 10}, {12, 0}}};
  // {x, y, width, height}; areas may overlap
  struct Rect {
    int x, y, w, h;
  };
  const Rect rects[18] = {
      {8, 3, 1, 5}, {9, 3, 1, 5}, {3, 6, 1, 1}, {11, 4, 2, 1}, {3, 8, 4, 1}, {9, 9, 3, 2},
      {10, 3, 3, 2}, {9, 6, 3, 2}, {11, 7, 2, 2}, {9, 9, 1, 1}, {10, 5, 2, 1}, {5, 1, 2, 1},
      {12, 10, 1, 1}, {2, 0, 3, 3}, {12, 6, 1, 2}, {6, 10, 1, 1}, {10, 9, 3, 2}, {1, 0, 2, 2},
  };
  for (const Rect& rect : rects) {
    Region r;
    r.id = static_cast<int>(map.regions.size());
    for (int dy = 0; dy < rect.h; ++dy) {
      for (int dx = 0; dx < rect.w; ++dx) r.cells.push_back({rect.x + dx, rect.y + dy});
    }
    map.regions.push_back(std::move(r));
  }
  map.bounds = WeightBounds::box(map.dimension(), 0.0, 1.0);
  map.bounds.lower[map.regions.size()] = kMinTimeWeight;
  map.validate();
  return map;
}

GridEnvironment::GridEnvironment(GridMap map, std::size_t task) : map_(std::move(map)), task_(task) {
  map_.validate();
  if (task_ >= map_.tasks.size()) throw ContractViolation("grid environment: no such task");
}

Path GridEnvironment::to_path(const LatticePath& cells) const {
  Path p;
  p.states.reserve(cells.size());
  for (Cell c : cells) p.states.push_back({static_cast<double>(c.x), static_cast<double>(c.y)});
  p.features = grid_features(map_, cells);
  return p;
}

LatticePath GridEnvironment::to_cells(const Path& path) {
  LatticePath cells;
  cells.reserve(path.states.size());
  for (const State& s : path.states) {
    if (s.size() != 2) throw ContractViolation("lattice state must be {x, y}");
    cells.push_back({static_cast<int>(s[0]), static_cast<int>(s[1])});
  }
  return cells;
}

Path GridEnvironment::optimal_path(const WeightVector& w) const {
  Path p = to_path(grid_optimal_path(map_, w, task_).path);
  p.optimal_for = w;
  return p;
}

FeatureVector GridEnvironment::compute_features(const Path& path) const {
  const LatticePath cells = to_cells(path);
  validate_path(map_, cells, task_);
  return grid_features(map_, cells);
}

nlohmann::json GridEnvironment::scene_json() const {
  nlohmann::json j = map_to_json(map_);
  j["kind"] = "gridworld";
  j["task"] = task_;
  return j;
}

nlohmann::json GridEnvironment::path_json(const Path& path) const {
  nlohmann::json cells = nlohmann::json::array();
  for (Cell c : to_cells(path)) cells.push_back(cell_to_json(c));
  return {{"cells", cells}};
}

}  // namespace prefregret::grid
