#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "prefregret/belief.hpp"
#include "prefregret/environment.hpp"
#include "prefregret/kernels.hpp"

namespace prefregret {

/// Indices into the belief's hypothesis set, a < b.
struct QueryPair {
  std::size_t a = 0;
  std::size_t b = 0;
  double score = 0.0;
};

enum class SelectionStatus {
  Selected,
  /// A pair was returned but every score was zero (point-mass posterior).
  NearConverged,
  /// No pair of hypotheses with distinct optimal paths is available.
  Converged,
};

struct Selection {
  SelectionStatus status = SelectionStatus::Converged;
  std::optional<QueryPair> pair;
};

/// Cost and regret of every hypothesis path under every hypothesis weight.
/// Built once per session; selectors only rescore it against new masses.
struct RegretTable {
  std::size_t n = 0;
  ObjectiveMode mode = ObjectiveMode::Cost;
  std::vector<double> cost;    // cost[i*n + j] = c(P_i, w_j)
  std::vector<double> regret;  // regret[i*n + j] = r(w_i, w_j)
  std::vector<double> offset;  // reward offset of w_j
  std::vector<double> weight_norm;  // |w_j|, 1 for a zero weight
  std::vector<int> path_class;

  static RegretTable build(std::span<const Hypothesis> hypotheses, const Environment& env);

  double regret_at(std::size_t i, std::size_t j) const { return regret[i * n + j]; }
  double cost_at(std::size_t i, std::size_t j) const { return cost[i * n + j]; }
  /// True when at least two hypotheses have different optimal paths.
  bool has_distinct_pair() const;
};

/// Softmax answer probabilities for every distinct-path class pair.
struct EntropyTable {
  std::size_t n = 0;
  std::vector<kernels::ClassPair> pairs;
  std::vector<double> answer;
  std::vector<double> cond_entropy;

  static EntropyTable build(const RegretTable& table);
};

/// P(w^a|U) P(w^b|U) (r(w^a,w^b) + r(w^b,w^a)).
double prob_symmetric_regret(std::size_t a, std::size_t b, const BeliefState& belief,
                             const Environment& env);

/// Expected information gain (bits) of asking (a, b) under the softmax model.
double information_gain(std::size_t a, std::size_t b, const BeliefState& belief);

Selection select_max_regret(const BeliefState& belief, const Environment& env);
Selection select_max_regret(const BeliefState& belief, const RegretTable& table);

Selection select_entropy(const BeliefState& belief);
Selection select_entropy(const BeliefState& belief, const EntropyTable& table);

Selection select_random(const BeliefState& belief, std::uint64_t seed);

/// Deterministic variant: restrict Omega to weights feasible under the
/// feedback and maximize plain symmetric regret.
Selection max_regret_feasible(const FeedbackSequence& feedback, std::span<const Hypothesis> omega,
                              const WeightBounds& bounds, const Environment& env);
Selection max_regret_feasible(const FeedbackSequence& feedback, std::span<const Hypothesis> omega,
                              const WeightBounds& bounds, const RegretTable& table);

}  // namespace prefregret
