#include <doctest.h>

#include <cmath>

#include "prefregret/errors.hpp"
#include "prefregret/rng.hpp"
#include "prefregret/user_sim.hpp"

using namespace prefregret;

namespace {

Path with_features(std::initializer_list<double> phi) {
  Path p;
  p.states = {{0.0}};
  p.features = FeatureVector(phi);
  return p;
}

SimulatedUser user(UserModel model, double p = 1.0, ObjectiveMode mode = ObjectiveMode::Cost) {
  SimulatedUser u;
  u.w_user = WeightVector{1.0, 0.0};
  u.model = model;
  u.p = p;
  u.seed = 42;
  u.mode = mode;
  return u;
}

}  // namespace

TEST_CASE("deterministic users pick the cheaper path") {
  const Path cheap = with_features({1.0, 5.0});
  const Path dear = with_features({2.0, 0.0});
  const SimulatedUser u = user(UserModel::Deterministic);
  for (std::uint64_t k = 0; k < 100; ++k) {
    CHECK(answer(u, cheap, dear, k) == Choice::First);
    CHECK(answer(u, dear, cheap, k) == Choice::Second);
  }
  CHECK(correct_prob(u, cheap, dear) == 1.0);
  // reward mode flips the preference
  const SimulatedUser r = user(UserModel::Deterministic, 1.0, ObjectiveMode::Reward);
  CHECK(answer(r, cheap, dear, 0) == Choice::Second);
  // ties go to the first path
  CHECK(answer(u, cheap, with_features({1.0, -3.0}), 0) == Choice::First);
}

TEST_CASE("flat-noise users are right with probability p") {
  const Path cheap = with_features({1.0, 0.0});
  const Path dear = with_features({2.0, 0.0});
  SimulatedUser u = user(UserModel::FlatNoise, 0.85);
  int right = 0;
  constexpr int kDraws = 10000;
  for (int k = 0; k < kDraws; ++k) right += answer(u, cheap, dear, static_cast<std::uint64_t>(k)) == Choice::First;
  CHECK(std::fabs(right / static_cast<double>(kDraws) - 0.85) <= 0.01);
  CHECK(correct_prob(u, cheap, dear) == 0.85);
}

TEST_CASE("softmax probabilities") {
  const SimulatedUser u = user(UserModel::Softmax);
  const Path a = with_features({1.0, 0.0});
  const Path b = with_features({2.0, 0.0});
  // utilities -1 and -2
  const double expected = std::exp(-1.0) / (std::exp(-1.0) + std::exp(-2.0));
  CHECK(correct_prob(u, a, b) == doctest::Approx(expected).epsilon(1e-15));
  CHECK(correct_prob(u, b, a) == doctest::Approx(expected).epsilon(1e-15));
  CHECK(correct_prob(u, a, a) == 0.5);
  CHECK(correct_prob(u, a, with_features({1.0, 7.0})) == 0.5);
  // no overflow for extreme gaps
  CHECK(correct_prob(u, with_features({0.0, 0.0}), with_features({1e4, 0.0})) == 1.0);

  int first = 0;
  constexpr int kDraws = 10000;
  for (int k = 0; k < kDraws; ++k) first += answer(u, a, b, static_cast<std::uint64_t>(k)) == Choice::First;
  const double sigma = std::sqrt(expected * (1 - expected) / kDraws);
  CHECK(std::fabs(first / static_cast<double>(kDraws) - expected) <= 5 * sigma);
}

TEST_CASE("answers are pure functions of their inputs") {
  const Path a = with_features({1.0, 0.0});
  const Path b = with_features({1.3, 0.0});
  SimulatedUser u = user(UserModel::Softmax);
  std::vector<Choice> first, second;
  for (std::uint64_t k = 0; k < 200; ++k) first.push_back(answer(u, a, b, k));
  for (std::uint64_t k = 0; k < 200; ++k) second.push_back(answer(u, a, b, k));
  CHECK(first == second);
  u.seed = 43;
  std::vector<Choice> other;
  for (std::uint64_t k = 0; k < 200; ++k) other.push_back(answer(u, a, b, k));
  CHECK(other != first);
}

TEST_CASE("model names") {
  CHECK(parse_user_model("softmax") == UserModel::Softmax);
  CHECK(parse_user_model("flat") == UserModel::FlatNoise);
  CHECK(parse_user_model("flat_noise") == UserModel::FlatNoise);
  CHECK(parse_user_model("deterministic") == UserModel::Deterministic);
  CHECK(std::string(to_string(UserModel::Softmax)) == "softmax");
  CHECK_THROWS_AS(parse_user_model("oracle"), ConfigError);
}

TEST_CASE("random unit weights") {
  Rng rng(3);
  for (int i = 0; i < 100; ++i) {
    const WeightVector w = random_unit_weight(7, rng);
    CHECK(w.size() == 7);
    CHECK(norm(w) == doctest::Approx(1.0).epsilon(1e-14));
  }
}
