#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "prefregret/learner.hpp"
#include "prefregret/user_sim.hpp"

namespace prefregret {

/// One row of a trial trace. Row 0 is the prior, before any query.
struct IterationRecord {
  std::size_t iteration = 0;
  double weight_error = 0.0;
  double path_error = 0.0;
  /// Easiness of the query asked at this iteration; NaN when none was asked.
  double correct_prob = 0.0;
  bool converged = false;
  bool answered_correctly = false;
  std::optional<QueryPair> pair;
};

struct TrialResult {
  std::vector<IterationRecord> records;  // K + 1 rows
  WeightVector w_user;
  WeightVector final_weight;
  Path final_path;
  FeedbackSequence feedback;
};

/// Runs K iterations against a simulated user and traces both error metrics.
TrialResult run_learning(const LearnerConfig& config, std::shared_ptr<const Environment> env,
                         const SimulatedUser& user);

struct UserSpec {
  UserModel model = UserModel::Softmax;
  double p = 0.85;
};

struct ExperimentConfig {
  nlohmann::json environment = {{"kind", "gridworld"}, {"map", "builtin:mobile"}};
  SelectorKind selector = SelectorKind::Regret;
  UserSpec user;
  std::size_t iterations = 10;
  std::size_t trials = 1;
  std::size_t omega_size = 200;
  double learner_p = 0.85;
  std::uint64_t seed = 0;
  std::string output;

  void validate() const;
  static ExperimentConfig from_json(const nlohmann::json& j);
  nlohmann::json to_json() const;
};

/// Per-trial seeds, derived from the master seed and trial index only, so the
/// same trial sees the same user and Omega under every selector.
struct TrialSeeds {
  std::uint64_t learner;
  std::uint64_t user_weight;
  std::uint64_t user_answers;
};
TrialSeeds trial_seeds(std::uint64_t master, std::size_t trial);

/// Fresh unit-norm user for `env`. Reward environments draw from the unit
/// sphere; cost environments draw from the bounds box and normalize, which
/// keeps every stage cost positive.
SimulatedUser make_trial_user(const Environment& env, const UserSpec& spec, const TrialSeeds& seeds);

struct Quantiles {
  std::size_t count = 0;
  double min = 0.0;
  double q1 = 0.0;
  double median = 0.0;
  double q3 = 0.0;
  double max = 0.0;
  double mean = 0.0;
};

/// Linear-interpolation quartiles of the finite entries of `values`.
Quantiles summarize(std::span<const double> values);

struct IterationSummary {
  std::size_t iteration = 0;
  Quantiles weight_error;
  Quantiles path_error;
  Quantiles correct_prob;
  double converged_fraction = 0.0;
};

struct StudyResult {
  ExperimentConfig config;
  std::vector<TrialResult> trials;
  std::vector<IterationSummary> summary;
};

StudyResult run_study(const ExperimentConfig& config);
StudyResult run_study(const ExperimentConfig& config, std::shared_ptr<const Environment> env);

/// Header `trial,iteration,selector,weight_error,path_error,correct_prob,converged`;
/// floats with 17 significant digits, missing values left empty.
void write_csv(std::ostream& out, const StudyResult& result);
nlohmann::json summary_json(const StudyResult& result);

/// Sample Pearson correlation. Throws UndefinedCorrelation on zero variance.
double pearson(std::span<const double> xs, std::span<const double> ys);

struct GeneralizationOptions {
  std::size_t n_users = 20;
  std::size_t n_estimates = 50;
  std::uint64_t seed = 0;
  /// Estimates are normalize(w_user + s g), g ~ N(0, I), s ~ U(0, noise_max).
  double noise_max = 1.5;
};

struct GeneralizationReport {
  std::vector<double> train_weight_error;
  std::vector<double> train_path_error;
  std::vector<double> test_path_error;  // mean over test scenarios
  double path_correlation = 0.0;
  double weight_correlation = 0.0;

  nlohmann::json to_json(bool include_scatter = false) const;
};

GeneralizationReport generalization_study(const Environment& train,
                                          std::span<const std::shared_ptr<const Environment>> tests,
                                          const GeneralizationOptions& options);

}  // namespace prefregret
