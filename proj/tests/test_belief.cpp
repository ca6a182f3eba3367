#include <doctest.h>

#include <numeric>

#include "fixtures.hpp"
#include "prefregret/belief.hpp"
#include "prefregret/core_model.hpp"
#include "prefregret/errors.hpp"
#include "prefregret/oracles.hpp"

using namespace prefregret;
using prefregret::testing::corridor_env;

namespace {

Path features_only(std::initializer_list<double> phi, double tag) {
  Path p;
  p.states = {{tag}};
  p.features = FeatureVector(phi);
  return p;
}

Hypothesis hyp(WeightVector w) {
  Hypothesis h;
  h.weight = std::move(w);
  return h;
}

}  // namespace

TEST_CASE("make_record stores the preferred path first") {
  const FeedbackRecord r = make_record(features_only({1.0, 2.0}, 0), features_only({3.0, 1.0}, 1));
  CHECK(r.delta == FeatureVector{-2.0, 1.0});
}

TEST_CASE("reward-mode constraint rows are negated deltas") {
  FeedbackSequence cost(ObjectiveMode::Cost), reward(ObjectiveMode::Reward);
  const FeedbackRecord r = make_record(features_only({1.0, 2.0}, 0), features_only({3.0, 1.0}, 1));
  cost.append(r);
  reward.append(r);
  CHECK(cost.matrix_rows()[0] == FeatureVector{-2.0, 1.0});
  CHECK(reward.matrix_rows()[0] == FeatureVector{2.0, -1.0});
}

TEST_CASE("likelihood is p on consistent and 1 - p on inconsistent answers") {
  const FeedbackRecord r = make_record(features_only({1.0, 0.0}, 0), features_only({0.0, 1.0}, 1));
  CHECK(likelihood(r, WeightVector{0.2, 1.0}, 0.85, ObjectiveMode::Cost) == 0.85);
  CHECK(likelihood(r, WeightVector{1.0, 0.2}, 0.85, ObjectiveMode::Cost) == doctest::Approx(0.15));
  CHECK(likelihood(r, WeightVector{1.0, 0.2}, 0.85, ObjectiveMode::Reward) == 0.85);
  // a tie counts as consistent
  CHECK(likelihood(r, WeightVector{1.0, 1.0}, 0.85, ObjectiveMode::Cost) == 0.85);
  CHECK_THROWS_AS(likelihood(r, WeightVector{1.0, 1.0}, 0.5, ObjectiveMode::Cost), ContractViolation);
}

TEST_CASE("two hypotheses after one answer") {
  BeliefState b({hyp({0.2, 1.0}), hyp({1.0, 0.2})}, 0.85, ObjectiveMode::Cost);
  CHECK(b.masses()[0] == doctest::Approx(0.5));
  b = update(std::move(b), make_record(features_only({1.0, 0.0}, 0), features_only({0.0, 1.0}, 1)));
  const auto m = b.masses();
  CHECK(m[0] == doctest::Approx(0.85).epsilon(1e-12));
  CHECK(m[1] == doctest::Approx(0.15).epsilon(1e-12));
  const WeightVector e = expected_weight(b);
  CHECK(e[0] == doctest::Approx(0.85 * 0.2 + 0.15 * 1.0));
  CHECK(e[1] == doctest::Approx(0.85 * 1.0 + 0.15 * 0.2));
}

TEST_CASE("p = 1 removes inconsistent hypotheses and fails when none remain") {
  BeliefState b({hyp({0.2, 1.0}), hyp({1.0, 0.2})}, 1.0, ObjectiveMode::Cost);
  const Path x = features_only({1.0, 0.0}, 0);
  const Path y = features_only({0.0, 1.0}, 1);
  b = update(std::move(b), make_record(x, y));
  CHECK(b.masses() == std::vector<double>{1.0, 0.0});
  try {
    b = update(std::move(b), make_record(y, x));
    FAIL("expected RenormalizationError");
  } catch (const RenormalizationError& e) {
    CHECK(e.record_index() == 1);
  }
}

TEST_CASE("expected weight falls back to the MAP weight when the mean vanishes") {
  BeliefState b({hyp({1.0, 0.0}), hyp({-1.0, 0.0})}, 0.85, ObjectiveMode::Cost);
  const std::vector<double> logs{0.0, 0.0};
  b.set_log_masses(logs);
  const WeightVector e = expected_weight(b);
  CHECK(e == WeightVector{1.0, 0.0});
}

TEST_CASE("feasible checks every row and the bounds") {
  FeedbackSequence f(ObjectiveMode::Cost);
  f.append(make_record(features_only({1.0, 0.0}, 0), features_only({0.0, 1.0}, 1)));
  const WeightBounds box = WeightBounds::box(2, 0.0, 1.0);
  CHECK(feasible(f, WeightVector{0.2, 1.0}, box));
  CHECK(feasible(f, WeightVector{1.0, 1.0}, box));
  CHECK_FALSE(feasible(f, WeightVector{1.0, 0.2}, box));
  CHECK_FALSE(feasible(f, WeightVector{0.2, 1.5}, box));
  CHECK(feasible(FeedbackSequence{}, WeightVector{0.5, 0.5}, box));
}

TEST_CASE("sample_omega is deterministic and stays in bounds") {
  const auto env = corridor_env();
  const auto a = sample_omega(*env, env->bounds(), 50, 11);
  const auto b = sample_omega(*env, env->bounds(), 50, 11);
  REQUIRE(a.size() == 50);
  for (std::size_t i = 0; i < a.size(); ++i) {
    CHECK(a[i].weight == b[i].weight);
    CHECK(env->bounds().contains(a[i].weight));
    CHECK(a[i].opt_cost == doctest::Approx(cost(a[i].opt_path, a[i].weight)));
  }
  CHECK(sample_omega(*env, env->bounds(), 50, 12)[0].weight != a[0].weight);
}

TEST_CASE("sequential updates match the product posterior") {
  const oracle::Comparison c = oracle::compare_belief_updates(200, 5);
  INFO(c.first_mismatch);
  CHECK(c.ok());
}

TEST_CASE("masses stay normalized under long answer sequences") {
  BeliefState b({hyp({0.2, 1.0}), hyp({1.0, 0.2}), hyp({0.5, 0.5})}, 0.99, ObjectiveMode::Cost);
  const FeedbackRecord r = make_record(features_only({1.0, 0.0}, 0), features_only({0.0, 1.0}, 1));
  for (int i = 0; i < 500; ++i) b = update(std::move(b), r);
  const auto m = b.masses();
  CHECK(std::accumulate(m.begin(), m.end(), 0.0) == doctest::Approx(1.0));
  CHECK(m[1] == 0.0);
  CHECK(m[0] == doctest::Approx(0.5));
}
