#pragma once

#include "prefregret/environment.hpp"
#include "prefregret/types.hpp"

namespace prefregret {

double cost(const FeatureVector& phi, const WeightVector& w);
double cost(const Path& path, const WeightVector& w);

/// c*(w): cost of the environment's optimal path for w.
double optimal_cost(const Environment& env, const WeightVector& w);

/// Normalized angular distance 0.5 * (1 - cos(w, w_user)), in [0, 1].
double err_weight(const WeightVector& w, const WeightVector& w_user);

/// Ratio of a path's cost under w^Q to the optimal cost of w^Q.
///
/// Cost mode: c / c*, requires c* > 0. Reward mode: 1 - (c - o) / (c* - o)
/// where o is the environment's reward offset for w^Q; requires c* > o.
/// Throws DegenerateObjective otherwise.
double regret_ratio(double cost_under_q, double optimal_cost_q, double offset_q,
                    ObjectiveMode mode);

/// Relative suboptimality of `path` for the user; 0 means optimal.
double err_path(const Path& path, const WeightVector& w_user, const Environment& env);
double err_path(double path_cost, double optimal_cost_user, double offset_user,
                ObjectiveMode mode);

/// Regret of the optimal path of wP evaluated under wQ.
double regret(const WeightVector& wP, const WeightVector& wQ, const Environment& env);
double symmetric_regret(const WeightVector& wP, const WeightVector& wQ, const Environment& env);

}  // namespace prefregret
