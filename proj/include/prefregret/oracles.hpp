#pragma once

// Brute-force references. Nothing here calls the selection kernels, the
// regret table or the grid planner; they exist to be compared against them.

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "prefregret/belief.hpp"
#include "prefregret/environment.hpp"
#include "prefregret/gridworld.hpp"
#include "prefregret/rng.hpp"

namespace prefregret::oracle {

struct GridOptimum {
  grid::LatticePath path;
  double cost = 0.0;
  std::size_t path_count = 0;
};

/// Minimum of phi . w over every enumerated simple path.
GridOptimum grid_brute_optimum(const grid::GridMap& map, const WeightVector& w,
                               std::size_t task = 0, std::size_t cap = 10000);

using IndexPair = std::pair<std::size_t, std::size_t>;

/// Exhaustive double loops over every hypothesis pair.
std::optional<IndexPair> brute_max_regret(std::span<const Hypothesis> hyps,
                                          std::span<const double> masses,
                                          const Environment& env);
std::optional<IndexPair> brute_entropy(std::span<const Hypothesis> hyps,
                                       std::span<const double> masses, ObjectiveMode mode);
std::optional<IndexPair> brute_feasible(const FeedbackSequence& feedback,
                                        std::span<const Hypothesis> hyps,
                                        const WeightBounds& bounds, const Environment& env);

/// Normalized posterior as the plain product of per-record likelihoods.
std::vector<double> product_posterior(std::span<const Hypothesis> hyps,
                                      std::span<const FeedbackRecord> records, double p,
                                      ObjectiveMode mode);

/// Outcome of diffing a fast path against its brute-force reference.
struct Comparison {
  Comparison(std::string n = {}) : name(std::move(n)) {}

  std::string name;
  std::size_t cases = 0;
  std::size_t mismatches = 0;
  std::string first_mismatch;

  bool ok() const noexcept { return cases > 0 && mismatches == 0; }
};

/// Random map with 2..max_side cells per side, up to four regions and one task.
grid::GridMap random_small_map(Rng& rng, int max_side = 4);

/// grid_optimal_path against exhaustive enumeration; exact cost equality.
Comparison compare_grid_planner(std::size_t cases, std::uint64_t seed, int max_side = 4);

/// The three selectors against exhaustive pair loops on random beliefs over
/// small grid and driver hypothesis sets; exact index equality.
std::vector<Comparison> compare_selectors(std::size_t cases, std::uint64_t seed,
                                          std::size_t max_omega = 20);

/// Sequential belief updates against the product posterior, within `tol`.
Comparison compare_belief_updates(std::size_t cases, std::uint64_t seed, double tol = 1e-12);

}  // namespace prefregret::oracle
