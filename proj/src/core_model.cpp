#include "prefregret/core_model.hpp"

#include <cmath>
#include <string>

#include "prefregret/errors.hpp"

namespace prefregret {

double cost(const FeatureVector& phi, const WeightVector& w) { return dot(phi, w); }

double cost(const Path& path, const WeightVector& w) { return dot(path.features, w); }

double optimal_cost(const Environment& env, const WeightVector& w) {
  return cost(env.optimal_path(w), w);
}

double err_weight(const WeightVector& w, const WeightVector& w_user) {
  if (w.size() != w_user.size()) throw ContractViolation("err_weight: dimension mismatch");
  const double nw = norm(w);
  const double nu = norm(w_user);
  if (nw == 0.0 || nu == 0.0) throw ContractViolation("err_weight: zero-norm weight");
  double c = 0.0;
  for (std::size_t i = 0; i < w.size(); ++i) c += w[i] * w_user[i];
  c /= nw * nu;
  if (c > 1.0) c = 1.0;
  if (c < -1.0) c = -1.0;
  return 0.5 * (1.0 - c);
}

double regret_ratio(double cost_under_q, double optimal_cost_q, double offset_q,
                    ObjectiveMode mode) {
  if (mode == ObjectiveMode::Cost) {
    if (!(optimal_cost_q > 0.0)) {
      throw DegenerateObjective("non-positive optimal cost " + std::to_string(optimal_cost_q) +
                                " in cost mode");
    }
    return cost_under_q / optimal_cost_q;
  }
  const double denom = optimal_cost_q - offset_q;
  if (!(denom > 0.0)) {
    throw DegenerateObjective("optimal reward does not exceed the reward offset");
  }
  return 1.0 - (cost_under_q - offset_q) / denom;
}

double err_path(double path_cost, double optimal_cost_user, double offset_user,
                ObjectiveMode mode) {
  const double r = regret_ratio(path_cost, optimal_cost_user, offset_user, mode);
  return mode == ObjectiveMode::Cost ? r - 1.0 : r;
}

double err_path(const Path& path, const WeightVector& w_user, const Environment& env) {
  return err_path(cost(path, w_user), optimal_cost(env, w_user), env.reward_offset(w_user),
                  env.mode());
}

double regret(const WeightVector& wP, const WeightVector& wQ, const Environment& env) {
  const Path p = env.optimal_path(wP);
  return regret_ratio(cost(p, wQ), optimal_cost(env, wQ), env.reward_offset(wQ), env.mode());
}

double symmetric_regret(const WeightVector& wP, const WeightVector& wQ, const Environment& env) {
  return regret(wP, wQ, env) + regret(wQ, wP, env);
}

}  // namespace prefregret
