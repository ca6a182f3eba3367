#include "prefregret/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <exception>
#include <limits>
#include <ostream>

#include "prefregret/core_model.hpp"
#include "prefregret/environment_factory.hpp"
#include "prefregret/errors.hpp"
#include "prefregret/rng.hpp"

namespace prefregret {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

/// Caches c*(w_user) and the reward offset so every error evaluation is one dot product.
struct UserReference {
  const WeightVector* w_user;
  double optimal;
  double offset;
  ObjectiveMode mode;

  UserReference(const Environment& env, const WeightVector& w)
      : w_user(&w), optimal(optimal_cost(env, w)), offset(env.reward_offset(w)), mode(env.mode()) {}

  double path_error(const Path& path) const { return err_path(cost(path, *w_user), optimal, offset, mode); }
};

WeightVector normalized(WeightVector w) {
  const double n = norm(w);
  if (!(n > 0.0)) throw ContractViolation("cannot normalize a zero weight");
  for (double& x : w) x /= n;
  return w;
}

WeightVector draw_user_weight(const Environment& env, Rng& rng) {
  if (env.mode() == ObjectiveMode::Reward) return random_unit_weight(env.dimension(), rng);
  const WeightBounds& b = env.bounds();
  WeightVector w(env.dimension());
  for (std::size_t i = 0; i < w.size(); ++i) w[i] = rng.uniform(b.lower[i], b.upper[i]);
  return normalized(std::move(w));
}

std::string format_real(double v) {
  if (std::isnan(v)) return "";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

nlohmann::json quantiles_json(const Quantiles& q) {
  if (q.count == 0) return {{"count", 0}};
  return {{"count", q.count}, {"min", q.min},   {"q1", q.q1},     {"median", q.median},
          {"q3", q.q3},       {"max", q.max},   {"mean", q.mean}};
}

template <class F>
void parallel_for(std::size_t n, F&& body) {
  std::exception_ptr failure;
  const auto count = static_cast<long long>(n);
#pragma omp parallel for schedule(dynamic)
  for (long long i = 0; i < count; ++i) {
    try {
      body(static_cast<std::size_t>(i));
    } catch (...) {
#pragma omp critical(experiments_failure)
      if (!failure) failure = std::current_exception();
    }
  }
  if (failure) std::rethrow_exception(failure);
}

}  // namespace

TrialResult run_learning(const LearnerConfig& config, std::shared_ptr<const Environment> env,
                         const SimulatedUser& user) {
  if (user.w_user.size() != env->dimension()) throw ContractViolation("run_learning: user dimension mismatch");
  Learner learner(env, config);
  const UserReference ref(*env, user.w_user);

  TrialResult result;
  result.w_user = user.w_user;
  auto measure = [&](IterationRecord& rec) {
    result.final_weight = learner.estimate_weight();
    result.final_path = learner.estimate_path();
    rec.weight_error = err_weight(result.final_weight, user.w_user);
    rec.path_error = ref.path_error(result.final_path);
  };

  IterationRecord prior;
  prior.correct_prob = kNaN;
  measure(prior);
  result.records.push_back(prior);

  bool converged = false;
  for (std::size_t k = 1; k <= config.iterations; ++k) {
    IterationRecord rec;
    rec.iteration = k;
    rec.correct_prob = kNaN;
    if (!converged) {
      const Selection& sel = learner.pending();
      if (!sel.pair) {
        converged = true;
      } else {
        const Path& first = learner.belief()[sel.pair->a].opt_path;
        const Path& second = learner.belief()[sel.pair->b].opt_path;
        const Choice choice = answer(user, first, second, k - 1);
        const bool first_better = prefers_first(first, second, user.w_user, user.mode);
        rec.pair = sel.pair;
        rec.correct_prob = correct_prob(user, first, second);
        rec.answered_correctly = (choice == Choice::First) == first_better;
        learner.answer(choice);
        measure(rec);
      }
    }
    if (converged) {
      rec.converged = true;
      rec.weight_error = result.records.back().weight_error;
      rec.path_error = result.records.back().path_error;
    }
    result.records.push_back(rec);
  }
  result.feedback = learner.belief().feedback();
  return result;
}

void ExperimentConfig::validate() const {
  if (iterations < 1) throw ConfigError("iterations", "must be at least 1");
  if (trials < 1) throw ConfigError("trials", "must be at least 1");
  if (omega_size < 2) throw ConfigError("omega_size", "must be at least 2");
  if (!(learner_p > 0.5 && learner_p <= 1.0)) throw ConfigError("p", "must lie in (0.5, 1]");
  if (user.model == UserModel::FlatNoise && !(user.p > 0.5 && user.p <= 1.0)) {
    throw ConfigError("user.p", "must lie in (0.5, 1]");
  }
  if (!environment.is_object()) throw ConfigError("environment", "expected an object");
}

ExperimentConfig ExperimentConfig::from_json(const nlohmann::json& j) {
  if (!j.is_object()) throw ConfigError("config", "expected a JSON object");
  ExperimentConfig c;
  auto field = [&](const char* name, auto& target) {
    if (!j.contains(name)) return;
    try {
      target = j.at(name).get<std::remove_reference_t<decltype(target)>>();
    } catch (const nlohmann::json::exception& e) {
      throw ConfigError(name, e.what());
    }
  };
  if (j.contains("environment")) c.environment = j.at("environment");
  if (j.contains("selector")) {
    if (!j.at("selector").is_string()) throw ConfigError("selector", "expected a string");
    c.selector = parse_selector(j.at("selector").get<std::string>());
  }
  if (j.contains("user")) {
    const auto& u = j.at("user");
    if (!u.is_object()) throw ConfigError("user", "expected an object");
    if (u.contains("model")) {
      if (!u.at("model").is_string()) throw ConfigError("user.model", "expected a string");
      c.user.model = parse_user_model(u.at("model").get<std::string>());
    }
    if (u.contains("p")) {
      if (!u.at("p").is_number()) throw ConfigError("user.p", "expected a number");
      c.user.p = u.at("p").get<double>();
    }
  }
  field("iterations", c.iterations);
  field("trials", c.trials);
  field("omega_size", c.omega_size);
  field("p", c.learner_p);
  field("seed", c.seed);
  field("output", c.output);
  c.validate();
  return c;
}

nlohmann::json ExperimentConfig::to_json() const {
  return {
      {"environment", environment},
      {"selector", prefregret::to_string(selector)},
      {"user", {{"model", prefregret::to_string(user.model)}, {"p", user.p}}},
      {"iterations", iterations},
      {"trials", trials},
      {"omega_size", omega_size},
      {"p", learner_p},
      {"seed", seed},
      {"output", output},
  };
}

TrialSeeds trial_seeds(std::uint64_t master, std::size_t trial) {
  const std::uint64_t base = mix_seed(master, trial);
  return {mix_seed(base, 1), mix_seed(base, 2), mix_seed(base, 3)};
}

SimulatedUser make_trial_user(const Environment& env, const UserSpec& spec, const TrialSeeds& seeds) {
  Rng rng(seeds.user_weight);
  SimulatedUser user;
  user.w_user = draw_user_weight(env, rng);
  user.model = spec.model;
  user.p = spec.p;
  user.seed = seeds.user_answers;
  user.mode = env.mode();
  return user;
}

Quantiles summarize(std::span<const double> values) {
  std::vector<double> v;
  v.reserve(values.size());
  for (double x : values) {
    if (std::isfinite(x)) v.push_back(x);
  }
  Quantiles q;
  q.count = v.size();
  if (v.empty()) return q;
  std::sort(v.begin(), v.end());
  auto at = [&](double f) {
    const double pos = f * static_cast<double>(v.size() - 1);
    const auto lo = static_cast<std::size_t>(std::floor(pos));
    const std::size_t hi = std::min(lo + 1, v.size() - 1);
    return v[lo] + (pos - static_cast<double>(lo)) * (v[hi] - v[lo]);
  };
  q.min = v.front();
  q.max = v.back();
  q.q1 = at(0.25);
  q.median = at(0.5);
  q.q3 = at(0.75);
  double sum = 0.0;
  for (double x : v) sum += x;
  q.mean = sum / static_cast<double>(v.size());
  return q;
}

StudyResult run_study(const ExperimentConfig& config) {
  config.validate();
  return run_study(config, make_environment(config.environment));
}

StudyResult run_study(const ExperimentConfig& config, std::shared_ptr<const Environment> env) {
  config.validate();
  StudyResult study;
  study.config = config;
  study.trials.resize(config.trials);
  parallel_for(config.trials, [&](std::size_t t) {
    const TrialSeeds seeds = trial_seeds(config.seed, t);
    const SimulatedUser user = make_trial_user(*env, config.user, seeds);
    LearnerConfig lc;
    lc.selector = config.selector;
    lc.omega_size = config.omega_size;
    lc.user_p = config.learner_p;
    lc.iterations = config.iterations;
    lc.seed = seeds.learner;
    study.trials[t] = run_learning(lc, env, user);
  });

  std::vector<double> we, pe, cp;
  for (std::size_t k = 0; k <= config.iterations; ++k) {
    we.clear();
    pe.clear();
    cp.clear();
    std::size_t converged = 0;
    for (const TrialResult& trial : study.trials) {
      const IterationRecord& r = trial.records[k];
      we.push_back(r.weight_error);
      pe.push_back(r.path_error);
      cp.push_back(r.correct_prob);
      converged += r.converged ? 1 : 0;
    }
    IterationSummary s;
    s.iteration = k;
    s.weight_error = summarize(we);
    s.path_error = summarize(pe);
    s.correct_prob = summarize(cp);
    s.converged_fraction = static_cast<double>(converged) / static_cast<double>(study.trials.size());
    study.summary.push_back(s);
  }
  return study;
}

void write_csv(std::ostream& out, const StudyResult& result) {
  const char* selector = to_string(result.config.selector);
  out << "trial,iteration,selector,weight_error,path_error,correct_prob,converged\n";
  for (std::size_t t = 0; t < result.trials.size(); ++t) {
    for (const IterationRecord& r : result.trials[t].records) {
      out << t << ',' << r.iteration << ',' << selector << ',' << format_real(r.weight_error) << ','
          << format_real(r.path_error) << ',' << format_real(r.correct_prob) << ',' << (r.converged ? 1 : 0)
          << '\n';
    }
  }
}

nlohmann::json summary_json(const StudyResult& result) {
  nlohmann::json rows = nlohmann::json::array();
  for (const IterationSummary& s : result.summary) {
    rows.push_back({{"iteration", s.iteration},
                    {"weight_error", quantiles_json(s.weight_error)},
                    {"path_error", quantiles_json(s.path_error)},
                    {"correct_prob", quantiles_json(s.correct_prob)},
                    {"converged_fraction", s.converged_fraction}});
  }
  return {{"config", result.config.to_json()}, {"iterations", rows}};
}

double pearson(std::span<const double> xs, std::span<const double> ys) {
  if (xs.size() != ys.size()) throw ContractViolation("pearson: length mismatch");
  if (xs.size() < 2) throw ContractViolation("pearson: need at least two points");
  double mx = 0.0, my = 0.0, sxx = 0.0, syy = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double n = static_cast<double>(i + 1);
    const double dx = xs[i] - mx;
    const double dy = ys[i] - my;
    mx += dx / n;
    my += dy / n;
    sxx += dx * (xs[i] - mx);
    syy += dy * (ys[i] - my);
    sxy += dx * (ys[i] - my);
  }
  if (!(sxx > 0.0) || !(syy > 0.0)) throw UndefinedCorrelation("pearson: zero variance");
  return std::clamp(sxy / std::sqrt(sxx * syy), -1.0, 1.0);
}

nlohmann::json GeneralizationReport::to_json(bool include_scatter) const {
  nlohmann::json j = {
      {"samples", test_path_error.size()},
      {"path_correlation", path_correlation},
      {"weight_correlation", weight_correlation},
      {"gap", path_correlation - weight_correlation},
  };
  if (include_scatter) {
    j["train_weight_error"] = train_weight_error;
    j["train_path_error"] = train_path_error;
    j["test_path_error"] = test_path_error;
  }
  return j;
}

GeneralizationReport generalization_study(const Environment& train,
                                          std::span<const std::shared_ptr<const Environment>> tests,
                                          const GeneralizationOptions& options) {
  if (tests.size() < 2) throw ContractViolation("generalization: need at least two test environments");
  if (options.n_users < 2 || options.n_estimates < 2) {
    throw ContractViolation("generalization: need at least two users and two estimates");
  }
  for (const auto& t : tests) {
    if (t->dimension() != train.dimension() || t->mode() != train.mode()) {
      throw ContractViolation("generalization: test environment differs in dimension or mode");
    }
  }

  std::vector<WeightVector> users;
  for (std::size_t u = 0; u < options.n_users; ++u) {
    Rng rng(mix_seed(mix_seed(options.seed, 0), u));
    users.push_back(draw_user_weight(train, rng));
  }
  // references[u][0] is the training scene, [1..] the test scenes
  std::vector<std::vector<UserReference>> references(options.n_users);
  parallel_for(options.n_users, [&](std::size_t u) {
    references[u].emplace_back(train, users[u]);
    for (const auto& t : tests) references[u].emplace_back(*t, users[u]);
  });

  const std::size_t total = options.n_users * options.n_estimates;
  GeneralizationReport report;
  report.train_weight_error.resize(total);
  report.train_path_error.resize(total);
  report.test_path_error.resize(total);
  parallel_for(total, [&](std::size_t i) {
    const std::size_t u = i / options.n_estimates;
    const std::size_t e = i % options.n_estimates;
    Rng rng(mix_seed(mix_seed(options.seed, 1 + u), e));
    const double scale = rng.uniform(0.0, options.noise_max);
    WeightVector w = users[u];
    for (double& x : w) x += scale * rng.normal();
    w = normalized(std::move(w));
    report.train_weight_error[i] = err_weight(w, users[u]);
    report.train_path_error[i] = references[u][0].path_error(train.optimal_path(w));
    double sum = 0.0;
    for (std::size_t t = 0; t < tests.size(); ++t) sum += references[u][t + 1].path_error(tests[t]->optimal_path(w));
    report.test_path_error[i] = sum / static_cast<double>(tests.size());
  });
  report.path_correlation = pearson(report.train_path_error, report.test_path_error);
  report.weight_correlation = pearson(report.train_weight_error, report.test_path_error);
  return report;
}

}  // namespace prefregret
