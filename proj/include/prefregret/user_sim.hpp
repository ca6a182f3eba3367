#pragma once

#include <cstdint>
#include <string>

#include "prefregret/rng.hpp"
#include "prefregret/types.hpp"

namespace prefregret {

enum class UserModel { Deterministic, FlatNoise, Softmax };
enum class Choice { First, Second };

const char* to_string(UserModel model);
UserModel parse_user_model(const std::string& name);

/// Hidden ground-truth user answering pairwise queries.
struct SimulatedUser {
  WeightVector w_user;
  UserModel model = UserModel::Softmax;
  double p = 1.0;  // FlatNoise only, in (1/2, 1]
  std::uint64_t seed = 0;
  ObjectiveMode mode = ObjectiveMode::Cost;
};

/// Utility used by the softmax model: reward, or negated cost.
double utility(const Path& path, const WeightVector& w, ObjectiveMode mode);

/// True iff `first` is at least as good as `second` under w (ties favour `first`).
bool prefers_first(const Path& first, const Path& second, const WeightVector& w, ObjectiveMode mode);

/// The user's choice for the call_index-th query; a pure function of its inputs.
Choice answer(const SimulatedUser& user, const Path& first, const Path& second,
              std::uint64_t call_index);

/// Probability that `answer` returns the path that is truly better for the user.
double correct_prob(const SimulatedUser& user, const Path& first, const Path& second);

/// Unit-norm weight from normalized i.i.d. standard normals.
WeightVector random_unit_weight(std::size_t d, Rng& rng);

}  // namespace prefregret
