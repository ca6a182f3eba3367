#include <doctest.h>

#include <algorithm>
#include <set>

#include "fixtures.hpp"
#include "prefregret/core_model.hpp"
#include "prefregret/errors.hpp"
#include "prefregret/gridworld.hpp"
#include "prefregret/oracles.hpp"

using namespace prefregret;
using namespace prefregret::grid;
using prefregret::testing::corridor_map;
using prefregret::testing::open_map;

TEST_CASE("simple path counts between opposite corners") {
  // self-avoiding corner-to-corner walks on n x n lattices: 2, 12, 184
  CHECK(enumerate_paths(open_map(2), 100).size() == 2);
  CHECK(enumerate_paths(open_map(3), 100).size() == 12);
  CHECK(enumerate_paths(open_map(4), 1000).size() == 184);
  CHECK_THROWS_AS(enumerate_paths(open_map(3), 1), OracleScaleError);
}

TEST_CASE("features count region cells and moves") {
  const GridMap m = corridor_map();
  const FeatureVector straight = grid_features(m, {{0, 0}, {1, 0}, {2, 0}});
  CHECK(straight == FeatureVector{1.0, 2.0});
  const FeatureVector detour = grid_features(m, {{0, 0}, {0, 1}, {1, 1}, {2, 1}, {2, 0}});
  CHECK(detour == FeatureVector{0.0, 4.0});

  GridMap scaled = m;
  scaled.step_time = 3.0;
  scaled.cell_length = 5.0;
  CHECK(grid_features(scaled, {{0, 0}, {1, 0}, {2, 0}}) == FeatureVector{5.0, 6.0});

  // overlapping regions both count the shared cell
  GridMap overlap = m;
  overlap.regions.push_back({1, {{1, 0}, {2, 0}}});
  overlap.bounds = WeightBounds{{0.0, 0.0, 0.05}, {1.0, 1.0, 1.0}};
  CHECK(grid_features(overlap, {{0, 0}, {1, 0}, {2, 0}}) == FeatureVector{1.0, 2.0, 2.0});
}

TEST_CASE("malformed walks are rejected") {
  const GridMap m = corridor_map();
  CHECK_THROWS_AS(grid_features(m, {{0, 0}, {2, 0}}), ContractViolation);
  CHECK_THROWS_AS(grid_features(m, {{0, 0}, {1, 0}, {0, 0}, {1, 0}, {2, 0}}), ContractViolation);
  CHECK_THROWS_AS(grid_features(m, {{0, 0}, {0, -1}}), ContractViolation);
  CHECK_THROWS_AS(validate_path(m, {{0, 0}, {1, 0}}, 0), ContractViolation);
}

TEST_CASE("planner switches at the hand-derived threshold") {
  const GridMap m = corridor_map();
  // straight costs w0 + 2 wt, detour 4 wt
  CHECK(grid_optimal_path(m, WeightVector{0.5, 0.3}).path.size() == 3);
  CHECK(grid_optimal_path(m, WeightVector{0.7, 0.3}).path.size() == 5);
  const GridPlan plan = grid_optimal_path(m, WeightVector{0.7, 0.3});
  CHECK(plan.accumulated_cost == doctest::Approx(1.2));
}

TEST_CASE("planner matches exhaustive enumeration") {
  const oracle::Comparison c = oracle::compare_grid_planner(300, 17);
  INFO(c.first_mismatch);
  CHECK(c.ok());
}

TEST_CASE("second-best path error against enumeration") {
  const GridMap m = open_map(3);
  const WeightVector w{0.8, 0.3};
  std::vector<double> costs;
  for (const LatticePath& p : enumerate_paths(m, 100)) costs.push_back(cost(grid_features(m, p), w));
  std::sort(costs.begin(), costs.end());
  const auto second = std::upper_bound(costs.begin(), costs.end(), costs.front());
  REQUIRE(second != costs.end());
  const GridEnvironment env(m);
  CHECK(err_path(*second, optimal_cost(env, w), 0.0, ObjectiveMode::Cost) ==
        doctest::Approx(*second / costs.front() - 1.0));
  CHECK(optimal_cost(env, w) == doctest::Approx(costs.front()));
}

TEST_CASE("map validation") {
  GridMap m = corridor_map();
  SUBCASE("time weight must stay positive") {
    m.bounds.lower[1] = 0.0;
    CHECK_THROWS_AS(m.validate(), ContractViolation);
  }
  SUBCASE("region cells inside the map") {
    m.regions[0].cells.push_back({5, 5});
    CHECK_THROWS_AS(m.validate(), ContractViolation);
  }
  SUBCASE("start differs from goal") {
    m.tasks[0].goal = m.tasks[0].start;
    CHECK_THROWS_AS(m.validate(), ContractViolation);
  }
  SUBCASE("bounds dimension") {
    m.bounds = WeightBounds::box(3, 0.1, 1.0);
    CHECK_THROWS_AS(m.validate(), ContractViolation);
  }
  SUBCASE("negative region weights that could make a stage cost non-positive") {
    m.bounds.lower[0] = -1.0;
    CHECK_THROWS_AS(m.validate(), ContractViolation);
  }
}

TEST_CASE("json round trip") {
  const GridMap m = mobile_map();
  const GridMap back = map_from_json(map_to_json(m));
  CHECK(map_to_json(back) == map_to_json(m));
  CHECK_THROWS_AS(map_from_json(nlohmann::json{{"width", 3}}), ConfigError);
}

TEST_CASE("built-in mobile map") {
  const GridMap m = mobile_map();
  CHECK(m.regions.size() == 18);
  CHECK(m.tasks.size() == 3);
  CHECK(m.dimension() == 19);

  const GridMap file = load_map(PREFREGRET_DATA_DIR "/mobile_map.json");
  REQUIRE(file.regions.size() == m.regions.size());
  for (std::size_t i = 0; i < m.regions.size(); ++i) {
    const std::set<Cell> a(m.regions[i].cells.begin(), m.regions[i].cells.end());
    const std::set<Cell> b(file.regions[i].cells.begin(), file.regions[i].cells.end());
    CHECK(a == b);
  }
  CHECK(map_to_json(file)["tasks"] == map_to_json(m)["tasks"]);
  CHECK(file.step_time == m.step_time);
  CHECK(file.cell_length == m.cell_length);
}

TEST_CASE("environment adapter") {
  const GridEnvironment env(corridor_map());
  const Path p = env.optimal_path(WeightVector{0.5, 0.3});
  CHECK(env.compute_features(p) == p.features);
  CHECK(GridEnvironment::to_cells(p).size() == 3);
  CHECK(env.path_json(p).at("cells").size() == 3);
  CHECK_THROWS_AS(GridEnvironment(corridor_map(), 1), ContractViolation);
}
