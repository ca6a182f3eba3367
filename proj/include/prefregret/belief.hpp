#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "prefregret/environment.hpp"
#include "prefregret/types.hpp"

namespace prefregret {

/// A sampled weight with its precomputed optimal path and cost.
struct Hypothesis {
  WeightVector weight;
  Path opt_path;
  double opt_cost = 0.0;
  double log_mass = 0.0;
};

/// One answered query; `delta` is preferred.features - rejected.features.
struct FeedbackRecord {
  Path preferred;
  Path rejected;
  FeatureVector delta;
};

FeedbackRecord make_record(Path preferred, Path rejected);

/// Ordered answers U^k. In Reward mode the constraint rows are the negated
/// deltas so that feasibility always reads row . w <= 0.
class FeedbackSequence {
 public:
  explicit FeedbackSequence(ObjectiveMode mode = ObjectiveMode::Cost) : mode_(mode) {}

  void append(FeedbackRecord record);
  std::size_t size() const noexcept { return records_.size(); }
  bool empty() const noexcept { return records_.empty(); }
  ObjectiveMode mode() const noexcept { return mode_; }
  const std::vector<FeedbackRecord>& records() const noexcept { return records_; }
  /// A^k, one row per record.
  const std::vector<FeatureVector>& matrix_rows() const noexcept { return rows_; }

 private:
  ObjectiveMode mode_;
  std::vector<FeedbackRecord> records_;
  std::vector<FeatureVector> rows_;
};

/// Posterior over the fixed hypothesis set. Log masses are kept with their
/// maximum at zero.
class BeliefState {
 public:
  BeliefState(std::vector<Hypothesis> hypotheses, double user_p, ObjectiveMode mode);

  std::size_t size() const noexcept { return hypotheses_.size(); }
  const std::vector<Hypothesis>& hypotheses() const noexcept { return hypotheses_; }
  const Hypothesis& operator[](std::size_t i) const { return hypotheses_[i]; }
  double user_p() const noexcept { return user_p_; }
  ObjectiveMode mode() const noexcept { return feedback_.mode(); }
  const FeedbackSequence& feedback() const noexcept { return feedback_; }

  /// Normalized posterior masses, summing to 1.
  std::vector<double> masses() const;
  /// Overwrites the unnormalized log masses (tests, snapshot restore).
  void set_log_masses(std::span<const double> log_masses);

  friend BeliefState update(BeliefState belief, const FeedbackRecord& record);

 private:
  void renormalize(std::size_t record_index);

  std::vector<Hypothesis> hypotheses_;
  double user_p_;
  FeedbackSequence feedback_;
};

/// Draws n weights uniformly from `bounds` and plans each. Planner failures
/// are skipped and redrawn, up to 10n attempts in total.
std::vector<Hypothesis> sample_omega(const Environment& env, const WeightBounds& bounds,
                                     std::size_t n, std::uint64_t seed);

/// P(answer | w) under the flat-noise user model with parameter p.
double likelihood(const FeedbackRecord& record, const WeightVector& w, double p,
                  ObjectiveMode mode);

BeliefState update(BeliefState belief, const FeedbackRecord& record);

/// Posterior mean; falls back to the MAP weight when the mean is (numerically) zero.
WeightVector expected_weight(const BeliefState& belief);

/// True iff every constraint row r satisfies r . w <= tol and w is within bounds.
bool feasible(const FeedbackSequence& feedback, const WeightVector& w, const WeightBounds& bounds,
              double tol = 1e-9);

}  // namespace prefregret
