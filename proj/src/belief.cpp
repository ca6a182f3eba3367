#include "prefregret/belief.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <limits>
#include <optional>
#include <string>

#include "prefregret/core_model.hpp"
#include "prefregret/errors.hpp"
#include "prefregret/rng.hpp"

namespace prefregret {

FeedbackRecord make_record(Path preferred, Path rejected) {
  if (preferred.features.size() != rejected.features.size()) {
    throw ContractViolation("feedback: paths have different feature dimensions");
  }
  FeatureVector delta(preferred.features.size());
  for (std::size_t i = 0; i < delta.size(); ++i) {
    delta[i] = preferred.features[i] - rejected.features[i];
  }
  return FeedbackRecord{std::move(preferred), std::move(rejected), std::move(delta)};
}

void FeedbackSequence::append(FeedbackRecord record) {
  FeatureVector row = record.delta;
  if (mode_ == ObjectiveMode::Reward) {
    for (double& v : row) v = -v;
  }
  rows_.push_back(std::move(row));
  records_.push_back(std::move(record));
}

BeliefState::BeliefState(std::vector<Hypothesis> hypotheses, double user_p, ObjectiveMode mode)
    : hypotheses_(std::move(hypotheses)), user_p_(user_p), feedback_(mode) {
  if (hypotheses_.empty()) throw ContractViolation("belief: empty hypothesis set");
  if (!(user_p > 0.5 && user_p <= 1.0)) {
    throw ContractViolation("belief: p must lie in (1/2, 1], got " + std::to_string(user_p));
  }
  renormalize(0);
}

std::vector<double> BeliefState::masses() const {
  std::vector<double> m(hypotheses_.size());
  double total = 0.0;
  for (std::size_t i = 0; i < m.size(); ++i) {
    m[i] = std::exp(hypotheses_[i].log_mass);
    total += m[i];
  }
  for (double& v : m) v /= total;
  return m;
}

void BeliefState::set_log_masses(std::span<const double> log_masses) {
  if (log_masses.size() != hypotheses_.size()) {
    throw ContractViolation("belief: log mass count does not match hypotheses");
  }
  for (std::size_t i = 0; i < log_masses.size(); ++i) hypotheses_[i].log_mass = log_masses[i];
  renormalize(feedback_.size());
}

void BeliefState::renormalize(std::size_t record_index) {
  double top = -std::numeric_limits<double>::infinity();
  for (const Hypothesis& h : hypotheses_) top = std::max(top, h.log_mass);
  if (!std::isfinite(top)) {
    throw RenormalizationError(record_index, "belief: every hypothesis has zero mass after record " +
                                                 std::to_string(record_index));
  }
  for (Hypothesis& h : hypotheses_) h.log_mass -= top;
}

std::vector<Hypothesis> sample_omega(const Environment& env, const WeightBounds& bounds,
                                     std::size_t n, std::uint64_t seed) {
  if (n < 2) throw ContractViolation("sample_omega: need at least two hypotheses");
  bounds.validate();
  if (bounds.size() != env.dimension()) {
    throw ContractViolation("sample_omega: bounds dimension differs from environment");
  }
  Rng rng(seed);
  const std::size_t max_attempts = 10 * n;
  std::size_t attempts = 0;
  std::vector<Hypothesis> out;
  out.reserve(n);

  while (out.size() < n) {
    const std::size_t batch = std::min(n - out.size(), max_attempts - attempts);
    if (batch == 0) {
      throw PlannerError("sample_omega: planner failed too often (" + std::to_string(attempts) +
                         " attempts for " + std::to_string(n) + " hypotheses)");
    }
    std::vector<WeightVector> weights(batch, WeightVector(bounds.size()));
    for (WeightVector& w : weights) {
      for (std::size_t i = 0; i < w.size(); ++i) w[i] = rng.uniform(bounds.lower[i], bounds.upper[i]);
    }
    std::vector<std::optional<Path>> plans(batch);
    std::exception_ptr failure;
#pragma omp parallel for schedule(dynamic)
    for (std::ptrdiff_t k = 0; k < static_cast<std::ptrdiff_t>(batch); ++k) {
      try {
        plans[k] = env.optimal_path(weights[k]);
      } catch (const PlannerError&) {
        // skipped; redrawn in the next batch
      } catch (...) {
#pragma omp critical(sample_omega_failure)
        if (!failure) failure = std::current_exception();
      }
    }
    if (failure) std::rethrow_exception(failure);
    attempts += batch;
    for (std::size_t k = 0; k < batch; ++k) {
      if (!plans[k]) continue;
      Hypothesis h;
      h.weight = std::move(weights[k]);
      h.opt_path = std::move(*plans[k]);
      h.opt_path.optimal_for = h.weight;
      h.opt_cost = cost(h.opt_path, h.weight);
      out.push_back(std::move(h));
    }
  }
  return out;
}

double likelihood(const FeedbackRecord& record, const WeightVector& w, double p, ObjectiveMode mode) {
  if (!(p > 0.5 && p <= 1.0)) throw ContractViolation("likelihood: p must lie in (1/2, 1]");
  const double d = dot(record.delta, w);
  const bool consistent = mode == ObjectiveMode::Cost ? d <= 0.0 : d >= 0.0;
  return consistent ? p : 1.0 - p;
}

BeliefState update(BeliefState belief, const FeedbackRecord& record) {
  const std::size_t index = belief.feedback_.size();
  for (Hypothesis& h : belief.hypotheses_) {
    h.log_mass += std::log(likelihood(record, h.weight, belief.user_p_, belief.mode()));
  }
  belief.feedback_.append(record);
  belief.renormalize(index);
  return belief;
}

WeightVector expected_weight(const BeliefState& belief) {
  const std::vector<double> m = belief.masses();
  const std::size_t d = belief[0].weight.size();
  WeightVector mean(d);
  double largest = 0.0;
  for (std::size_t i = 0; i < belief.size(); ++i) {
    const WeightVector& w = belief[i].weight;
    for (std::size_t k = 0; k < d; ++k) mean[k] += m[i] * w[k];
    largest = std::max(largest, norm(w));
  }
  if (norm(mean) <= 1e-12 * largest) {
    const auto top = std::max_element(m.begin(), m.end()) - m.begin();
    return belief[static_cast<std::size_t>(top)].weight;
  }
  return mean;
}

bool feasible(const FeedbackSequence& feedback, const WeightVector& w, const WeightBounds& bounds,
              double tol) {
  if (!bounds.contains(w)) return false;
  for (const FeatureVector& row : feedback.matrix_rows()) {
    if (dot(row, w) > tol) return false;
  }
  return true;
}

}  // namespace prefregret
