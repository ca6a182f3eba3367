#include <doctest.h>

#include <cmath>

#include "fixtures.hpp"
#include "prefregret/core_model.hpp"
#include "prefregret/errors.hpp"

using namespace prefregret;
using prefregret::testing::corridor_env;

TEST_CASE("dot and cost") {
  const FeatureVector phi{1.0, 2.0, 3.0};
  const WeightVector w{0.5, -1.0, 2.0};
  CHECK(cost(phi, w) == doctest::Approx(4.5));
  CHECK_THROWS_AS(dot(phi, WeightVector{1.0}), ContractViolation);
}

TEST_CASE("err_weight reference values") {
  const WeightVector u{1.0, 0.0};
  CHECK(err_weight(WeightVector{2.0, 0.0}, u) == doctest::Approx(0.0));
  CHECK(err_weight(WeightVector{-1.0, 0.0}, u) == doctest::Approx(1.0));
  CHECK(err_weight(WeightVector{0.0, 3.0}, u) == doctest::Approx(0.5));
  CHECK(err_weight(WeightVector{1.0, 1.0}, u) == doctest::Approx(0.5 * (1.0 - 1.0 / std::sqrt(2.0))));
}

TEST_CASE("regret ratio in both modes") {
  CHECK(regret_ratio(6.0, 4.0, 0.0, ObjectiveMode::Cost) == doctest::Approx(1.5));
  CHECK(regret_ratio(2.0, 5.0, 1.0, ObjectiveMode::Reward) == doctest::Approx(0.75));
  CHECK(regret_ratio(5.0, 5.0, 1.0, ObjectiveMode::Reward) == 0.0);
  CHECK_THROWS_AS(regret_ratio(1.0, 0.0, 0.0, ObjectiveMode::Cost), DegenerateObjective);
  CHECK_THROWS_AS(regret_ratio(1.0, 1.0, 1.0, ObjectiveMode::Reward), DegenerateObjective);
}

TEST_CASE("err_path in both modes") {
  CHECK(err_path(8.0, 4.0, 0.0, ObjectiveMode::Cost) == doctest::Approx(1.0));
  CHECK(err_path(4.0, 4.0, 0.0, ObjectiveMode::Cost) == 0.0);
  CHECK(err_path(3.0, 5.0, 1.0, ObjectiveMode::Reward) == doctest::Approx(0.5));
}

TEST_CASE("regret on the corridor map matches hand-computed costs") {
  const auto env = corridor_env();
  // wP prefers the detour (0.4 < 1.2), wQ the straight path (2 < 4).
  const WeightVector wP{1.0, 0.1};
  const WeightVector wQ{0.0, 1.0};
  CHECK(optimal_cost(*env, wP) == doctest::Approx(0.4));
  CHECK(optimal_cost(*env, wQ) == doctest::Approx(2.0));
  CHECK(regret(wP, wQ, *env) == doctest::Approx(4.0 / 2.0));
  CHECK(regret(wQ, wP, *env) == doctest::Approx(1.2 / 0.4));
  CHECK(regret(wP, wP, *env) == doctest::Approx(1.0));
  CHECK(symmetric_regret(wP, wQ, *env) == doctest::Approx(5.0));
  CHECK(err_path(env->optimal_path(wP), wQ, *env) == doctest::Approx(1.0));
  CHECK(err_path(env->optimal_path(wQ), wQ, *env) == 0.0);
}

TEST_CASE("path identity") {
  Path a;
  a.states = {{0.0, 0.0}, {1.0, 0.0}};
  Path b = a;
  b.features = FeatureVector{9.0};
  CHECK(same_path(a, b));
  b.states[1] = {0.0, 1.0};
  CHECK_FALSE(same_path(a, b));
  Path c = a;
  c.controls = {0.1, 0.2};
  Path d = a;
  d.controls = {0.1, 0.3};
  CHECK_FALSE(same_path(c, d));

  const Path* all[] = {&a, &b, &a, &c};
  CHECK(path_classes(all) == std::vector<int>{0, 1, 0, 2});
}

TEST_CASE("weight bounds") {
  const WeightBounds b = WeightBounds::box(2, -1.0, 1.0);
  CHECK(b.contains(WeightVector{1.0, -1.0}));
  CHECK_FALSE(b.contains(WeightVector{1.0 + 1e-9, 0.0}));
  CHECK(b.contains(WeightVector{1.0 + 1e-9, 0.0}, 1e-8));
  CHECK_THROWS_AS((WeightBounds{{1.0}, {0.0}}.validate()), ContractViolation);
}
