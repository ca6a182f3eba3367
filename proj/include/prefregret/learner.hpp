#pragma once

#include <cstddef>
#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "prefregret/belief.hpp"
#include "prefregret/environment.hpp"
#include "prefregret/selection.hpp"
#include "prefregret/user_sim.hpp"

namespace prefregret {

enum class SelectorKind { Regret, Entropy, Random, Feasible };

const char* to_string(SelectorKind kind);
SelectorKind parse_selector(const std::string& name);

struct LearnerConfig {
  SelectorKind selector = SelectorKind::Regret;
  std::size_t omega_size = 200;
  double user_p = 0.85;
  std::size_t iterations = 10;
  std::uint64_t seed = 0;

  void validate() const;
};

/// The query loop of maximum-regret learning with the user left open:
/// sample Omega once, then alternate `pending()` / `answer()`.
class Learner {
 public:
  Learner(std::shared_ptr<const Environment> env, LearnerConfig config);

  const Environment& environment() const noexcept { return *env_; }
  const LearnerConfig& config() const noexcept { return config_; }
  const BeliefState& belief() const noexcept { return belief_; }
  const RegretTable& table() const noexcept { return table_; }

  /// Number of answered queries.
  std::size_t iteration() const noexcept { return belief_.feedback().size(); }
  bool finished() const noexcept { return iteration() >= config_.iterations; }

  /// Current query, selected on first call and cached until answered.
  const Selection& pending();
  bool has_pending() const noexcept { return pending_.has_value(); }

  /// Records the user's choice for the pending query; the chosen path is the
  /// preferred one. Throws ContractViolation if there is nothing to answer.
  void answer(Choice choice);

  WeightVector estimate_weight() const;
  Path estimate_path() const;

 private:
  Selection select();

  std::shared_ptr<const Environment> env_;
  LearnerConfig config_;
  BeliefState belief_;
  RegretTable table_;
  std::optional<EntropyTable> entropy_;
  std::optional<Selection> pending_;
};

}  // namespace prefregret
