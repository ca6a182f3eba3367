#pragma once

// Randomized invariant checks shared by the unit tests (few cases) and the
// acceptance suite (many cases). Each property draws its own inputs from `seed`.

#include <cstddef>
#include <cstdint>
#include <functional>
#include <string>
#include <utility>
#include <vector>

namespace prefregret::testing {

struct PropertyResult {
  PropertyResult(std::string n = {}) : name(std::move(n)) {}

  std::string name;
  std::size_t cases = 0;
  std::size_t failures = 0;
  std::string first_failure;

  void check(bool ok, const std::string& detail);
  bool ok() const noexcept { return cases > 0 && failures == 0; }
};

using Property = std::function<PropertyResult(std::uint64_t seed, std::size_t cases)>;

struct NamedProperty {
  std::string module;
  Property run;
  /// Relative weight of this property when a total case budget is split.
  std::size_t weight = 1;
};

PropertyResult err_weight_scale_invariance(std::uint64_t seed, std::size_t cases);
PropertyResult cost_regret_lower_bound(std::uint64_t seed, std::size_t cases);
PropertyResult symmetric_regret_symmetry(std::uint64_t seed, std::size_t cases);
PropertyResult err_path_nonnegative(std::uint64_t seed, std::size_t cases);
PropertyResult feature_cache_consistency(std::uint64_t seed, std::size_t cases);

PropertyResult belief_permutation_invariance(std::uint64_t seed, std::size_t cases);
PropertyResult belief_normalization(std::uint64_t seed, std::size_t cases);
PropertyResult belief_p1_matches_feasible(std::uint64_t seed, std::size_t cases);
PropertyResult belief_monotone_concentration(std::uint64_t seed, std::size_t cases);

PropertyResult selector_scale_invariance(std::uint64_t seed, std::size_t cases);
PropertyResult selector_determinism(std::uint64_t seed, std::size_t cases);
PropertyResult regret_prefers_separated_pairs(std::uint64_t seed, std::size_t cases);

PropertyResult grid_planner_optimality(std::uint64_t seed, std::size_t cases);
PropertyResult grid_region_monotonicity(std::uint64_t seed, std::size_t cases);
PropertyResult grid_accumulated_cost(std::uint64_t seed, std::size_t cases);

PropertyResult driver_refinement_dominance(std::uint64_t seed, std::size_t cases);
PropertyResult driver_feature_bounds(std::uint64_t seed, std::size_t cases);

PropertyResult user_complementary_answers(std::uint64_t seed, std::size_t cases);
PropertyResult user_softmax_monotonicity(std::uint64_t seed, std::size_t cases);
PropertyResult user_seed_determinism(std::uint64_t seed, std::size_t cases);

PropertyResult feedback_ordering(std::uint64_t seed, std::size_t cases);
PropertyResult feasible_error_trajectory(std::uint64_t seed, std::size_t cases);
PropertyResult trial_reproducibility(std::uint64_t seed, std::size_t cases);
PropertyResult estimate_validity(std::uint64_t seed, std::size_t cases);

/// Every property above, tagged with its module.
std::vector<NamedProperty> all_properties();

}  // namespace prefregret::testing
