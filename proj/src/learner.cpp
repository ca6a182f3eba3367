#include "prefregret/learner.hpp"

#include "prefregret/errors.hpp"
#include "prefregret/rng.hpp"

namespace prefregret {

const char* to_string(SelectorKind kind) {
  switch (kind) {
    case SelectorKind::Regret: return "regret";
    case SelectorKind::Entropy: return "entropy";
    case SelectorKind::Random: return "random";
    case SelectorKind::Feasible: return "feasible";
  }
  return "?";
}

SelectorKind parse_selector(const std::string& name) {
  if (name == "regret") return SelectorKind::Regret;
  if (name == "entropy") return SelectorKind::Entropy;
  if (name == "random") return SelectorKind::Random;
  if (name == "feasible") return SelectorKind::Feasible;
  throw ConfigError("selector", "unknown selector '" + name + "'");
}

void LearnerConfig::validate() const {
  if (omega_size < 2) throw ConfigError("omega_size", "must be at least 2");
  if (!(user_p > 0.5 && user_p <= 1.0)) throw ConfigError("p", "must lie in (0.5, 1]");
  if (iterations < 1) throw ConfigError("iterations", "must be at least 1");
}

namespace {

BeliefState initial_belief(const Environment& env, const LearnerConfig& config) {
  config.validate();
  return BeliefState(sample_omega(env, env.bounds(), config.omega_size, mix_seed(config.seed, 1)), config.user_p,
                     env.mode());
}

}  // namespace

Learner::Learner(std::shared_ptr<const Environment> env, LearnerConfig config)
    : env_(std::move(env)),
      config_(config),
      belief_(initial_belief(*env_, config_)),
      table_(RegretTable::build(belief_.hypotheses(), *env_)) {
  if (config_.selector == SelectorKind::Entropy) entropy_ = EntropyTable::build(table_);
}

Selection Learner::select() {
  switch (config_.selector) {
    case SelectorKind::Regret:
      return select_max_regret(belief_, table_);
    case SelectorKind::Entropy:
      return select_entropy(belief_, *entropy_);
    case SelectorKind::Random:
      return select_random(belief_, mix_seed(config_.seed, 1000 + iteration()));
    case SelectorKind::Feasible:
      return max_regret_feasible(belief_.feedback(), belief_.hypotheses(), env_->bounds(), table_);
  }
  throw ContractViolation("unknown selector");
}

const Selection& Learner::pending() {
  if (finished()) throw ContractViolation("learner: all iterations answered");
  if (!pending_) pending_ = select();
  return *pending_;
}

void Learner::answer(Choice choice) {
  if (!pending_ || !pending_->pair) throw ContractViolation("learner: no pending query to answer");
  const Path& a = belief_[pending_->pair->a].opt_path;
  const Path& b = belief_[pending_->pair->b].opt_path;
  FeedbackRecord record = choice == Choice::First ? make_record(a, b) : make_record(b, a);
  belief_ = update(std::move(belief_), record);
  pending_.reset();
}

WeightVector Learner::estimate_weight() const { return expected_weight(belief_); }

Path Learner::estimate_path() const {
  const WeightVector w = estimate_weight();
  return env_->optimal_path(w);
}

}  // namespace prefregret
