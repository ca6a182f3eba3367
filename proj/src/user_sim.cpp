#include "prefregret/user_sim.hpp"

#include <cmath>

#include "prefregret/core_model.hpp"
#include "prefregret/errors.hpp"

namespace prefregret {

namespace {

/// e^{u1} / (e^{u1} + e^{u2}), evaluated without overflow.
double softmax_first(double u1, double u2) {
  const double d = u1 - u2;
  if (d >= 0.0) return 1.0 / (1.0 + std::exp(-d));
  const double e = std::exp(d);
  return e / (1.0 + e);
}

}  // namespace

const char* to_string(UserModel model) {
  switch (model) {
    case UserModel::Deterministic: return "deterministic";
    case UserModel::FlatNoise: return "flat";
    case UserModel::Softmax: return "softmax";
  }
  return "?";
}

UserModel parse_user_model(const std::string& name) {
  if (name == "deterministic") return UserModel::Deterministic;
  if (name == "flat" || name == "flat_noise") return UserModel::FlatNoise;
  if (name == "softmax") return UserModel::Softmax;
  throw ConfigError("user.model", "unknown user model '" + name + "'");
}

double utility(const Path& path, const WeightVector& w, ObjectiveMode mode) {
  const double c = cost(path, w);
  return mode == ObjectiveMode::Reward ? c : -c;
}

bool prefers_first(const Path& first, const Path& second, const WeightVector& w, ObjectiveMode mode) {
  return utility(first, w, mode) >= utility(second, w, mode);
}

Choice answer(const SimulatedUser& user, const Path& first, const Path& second, std::uint64_t call_index) {
  const Choice better = prefers_first(first, second, user.w_user, user.mode) ? Choice::First : Choice::Second;
  const Choice worse = better == Choice::First ? Choice::Second : Choice::First;
  switch (user.model) {
    case UserModel::Deterministic:
      return better;
    case UserModel::FlatNoise:
      return uniform_at(user.seed, call_index) < user.p ? better : worse;
    case UserModel::Softmax: {
      const double p_first =
          softmax_first(utility(first, user.w_user, user.mode), utility(second, user.w_user, user.mode));
      return uniform_at(user.seed, call_index) < p_first ? Choice::First : Choice::Second;
    }
  }
  return better;
}

double correct_prob(const SimulatedUser& user, const Path& first, const Path& second) {
  switch (user.model) {
    case UserModel::Deterministic:
      return 1.0;
    case UserModel::FlatNoise:
      return user.p;
    case UserModel::Softmax: {
      const double p_first =
          softmax_first(utility(first, user.w_user, user.mode), utility(second, user.w_user, user.mode));
      return std::max(p_first, 1.0 - p_first);
    }
  }
  return 1.0;
}

WeightVector random_unit_weight(std::size_t d, Rng& rng) {
  if (d == 0) throw ContractViolation("random_unit_weight: zero dimension");
  WeightVector w(d);
  double n = 0.0;
  while (n < 1e-12) {
    for (std::size_t i = 0; i < d; ++i) w[i] = rng.normal();
    n = norm(w);
  }
  for (double& x : w) x /= n;
  return w;
}

}  // namespace prefregret
