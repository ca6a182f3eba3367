#include <cstdio>
#include <fstream>
#include <iostream>
#include <memory>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include <json.hpp>

#include "prefregret/environment_factory.hpp"
#include "prefregret/errors.hpp"
#include "prefregret/experiments.hpp"
#include "prefregret/oracles.hpp"
#ifdef PREFREGRET_WITH_SERVICE
#include "httplib.h"
#include "prefregret/service.hpp"
#endif

using namespace prefregret;

namespace {

nlohmann::json read_json(const std::string& file) {
  std::ifstream in(file);
  if (!in) throw ConfigError("config", "cannot open " + file);
  try {
    return nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError("config", file + ": " + e.what());
  }
}

/// Accepts inline JSON or a path to a JSON file.
nlohmann::json json_arg(const std::string& text) {
  if (!text.empty() && (text.front() == '{' || text.front() == '[')) return nlohmann::json::parse(text);
  return read_json(text);
}

struct StudyOptions {
  std::string config;
  std::string environment;
  std::string selector;
  std::string user_model;
  double user_p = 0.0;
  std::size_t iterations = 0;
  std::size_t trials = 0;
  std::size_t omega = 0;
  double p = 0.0;
  long long seed = -1;
};

void add_study_options(CLI::App* cmd, StudyOptions& o) {
  cmd->add_option("-c,--config", o.config, "experiment config JSON file");
  cmd->add_option("-e,--environment", o.environment, "environment JSON (inline or file)");
  cmd->add_option("-s,--selector", o.selector, "regret | entropy | random | feasible");
  cmd->add_option("--user-model", o.user_model, "deterministic | flat | softmax");
  cmd->add_option("--user-p", o.user_p, "answer accuracy of the flat-noise user");
  cmd->add_option("-k,--iterations", o.iterations, "queries per trial");
  cmd->add_option("--omega", o.omega, "number of sampled hypotheses");
  cmd->add_option("-p,--p", o.p, "learner noise parameter in (0.5, 1]");
  cmd->add_option("--seed", o.seed, "master seed");
}

ExperimentConfig resolve(const StudyOptions& o) {
  nlohmann::json j = o.config.empty() ? nlohmann::json::object() : read_json(o.config);
  if (!o.environment.empty()) j["environment"] = json_arg(o.environment);
  if (!o.selector.empty()) j["selector"] = o.selector;
  if (!o.user_model.empty()) j["user"]["model"] = o.user_model;
  if (o.user_p > 0.0) j["user"]["p"] = o.user_p;
  if (o.iterations > 0) j["iterations"] = o.iterations;
  if (o.trials > 0) j["trials"] = o.trials;
  if (o.omega > 0) j["omega_size"] = o.omega;
  if (o.p > 0.0) j["p"] = o.p;
  if (o.seed >= 0) j["seed"] = o.seed;
  return ExperimentConfig::from_json(j);
}

std::string fmt(double v, const char* spec = "%.4f") {
  if (v != v) return "-";
  char buf[32];
  std::snprintf(buf, sizeof buf, spec, v);
  return buf;
}

int cmd_run(const StudyOptions& o, bool json_out) {
  ExperimentConfig config = resolve(o);
  config.trials = 1;
  StudyResult study = run_study(config);
  const TrialResult& t = study.trials.front();
  if (json_out) {
    nlohmann::json rows = nlohmann::json::array();
    for (const IterationRecord& r : t.records) {
      nlohmann::json row = {{"iteration", r.iteration},
                            {"weight_error", r.weight_error},
                            {"path_error", r.path_error},
                            {"converged", r.converged}};
      if (r.pair) row["pair"] = {r.pair->a, r.pair->b};
      if (r.correct_prob == r.correct_prob) row["correct_prob"] = r.correct_prob;
      rows.push_back(row);
    }
    std::cout << nlohmann::json{{"w_user", t.w_user.values()}, {"final_weight", t.final_weight.values()},
                                {"trace", rows}}
                     .dump(2)
              << '\n';
    return 0;
  }
  std::printf("%4s  %10s  %10s  %8s  %s\n", "iter", "weight_err", "path_err", "p_corr", "pair");
  for (const IterationRecord& r : t.records) {
    const std::string pair =
        r.pair ? std::to_string(r.pair->a) + "," + std::to_string(r.pair->b) : (r.converged ? "converged" : "-");
    std::printf("%4zu  %10s  %10s  %8s  %s\n", r.iteration, fmt(r.weight_error).c_str(), fmt(r.path_error).c_str(),
                fmt(r.correct_prob, "%.3f").c_str(), pair.c_str());
  }
  return 0;
}

int cmd_experiment(const StudyOptions& o, std::string output, const std::string& summary) {
  const ExperimentConfig config = resolve(o);
  if (output.empty()) output = config.output;
  const StudyResult study = run_study(config);
  if (output.empty() || output == "-") {
    write_csv(std::cout, study);
  } else {
    std::ofstream out(output);
    if (!out) throw ConfigError("output", "cannot write " + output);
    write_csv(out, study);
  }
  if (!summary.empty()) {
    std::ofstream out(summary);
    if (!out) throw ConfigError("summary", "cannot write " + summary);
    out << summary_json(study).dump(2) << '\n';
  }
  const IterationSummary& last = study.summary.back();
  std::fprintf(stderr, "%zu trials, iteration %zu: median path error %s, mean path error %s\n", config.trials,
               last.iteration, fmt(last.path_error.median).c_str(), fmt(last.path_error.mean).c_str());
  return 0;
}

int cmd_generalize(const std::string& config_file, GeneralizationOptions options, bool scatter) {
  std::shared_ptr<const Environment> train;
  std::vector<std::shared_ptr<const Environment>> tests;
  if (config_file.empty()) {
    train = make_environment({{"kind", "driver"}, {"scene", "builtin:standard"}, {"variant", 0}});
    for (int v = 1; v <= 5; ++v) {
      tests.push_back(make_environment({{"kind", "driver"}, {"scene", "builtin:standard"}, {"variant", v}}));
    }
  } else {
    const nlohmann::json j = read_json(config_file);
    if (!j.contains("train") || !j.contains("tests")) throw ConfigError("config", "expected 'train' and 'tests'");
    train = make_environment(j.at("train"));
    for (const auto& t : j.at("tests")) tests.push_back(make_environment(t));
  }
  const GeneralizationReport report = generalization_study(*train, tests, options);
  std::cout << report.to_json(scatter).dump(2) << '\n';
  return 0;
}

int cmd_oracle(std::size_t cases, std::uint64_t seed) {
  std::vector<oracle::Comparison> all;
  all.push_back(oracle::compare_grid_planner(cases, seed));
  for (auto& c : oracle::compare_selectors(cases, seed + 1)) all.push_back(std::move(c));
  all.push_back(oracle::compare_belief_updates(cases, seed + 2));
  bool ok = true;
  for (const oracle::Comparison& c : all) {
    std::printf("%-46s %5zu cases  %zu mismatches%s%s\n", c.name.c_str(), c.cases, c.mismatches,
                c.first_mismatch.empty() ? "" : "  first: ", c.first_mismatch.c_str());
    ok = ok && c.ok();
  }
  return ok ? 0 : 1;
}

#ifdef PREFREGRET_WITH_SERVICE
int cmd_serve(const std::string& host, int port, const std::string& data_dir) {
  service::SessionStore store(data_dir);
  const std::size_t restored = store.load_snapshots();
  httplib::Server server;
  service::mount(server, store);
  std::fprintf(stderr, "listening on %s:%d (%zu sessions restored)\n", host.c_str(), port, restored);
  return server.listen(host, port) ? 0 : 1;
}
#endif

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Active preference learning with maximum-regret queries"};
  app.require_subcommand(1);

  StudyOptions run_opts;
  bool run_json = false;
  auto* run = app.add_subcommand("run", "run one learning session against a simulated user and print the trace");
  add_study_options(run, run_opts);
  run->add_flag("--json", run_json, "print the trace as JSON");

  StudyOptions exp_opts;
  std::string output, summary;
  auto* exp = app.add_subcommand("experiment", "run a multi-trial study and write the per-iteration CSV");
  add_study_options(exp, exp_opts);
  exp->add_option("-n,--trials", exp_opts.trials, "number of trials");
  exp->add_option("-o,--output", output, "CSV output file ('-' for stdout)");
  exp->add_option("--summary", summary, "summary JSON output file");

  std::string gen_config;
  GeneralizationOptions gen;
  bool scatter = false;
  auto* generalize = app.add_subcommand("generalize", "correlate training and test path errors");
  generalize->add_option("-c,--config", gen_config, "JSON with 'train' and 'tests' environments");
  generalize->add_option("--users", gen.n_users, "number of random users");
  generalize->add_option("--estimates", gen.n_estimates, "perturbed estimates per user");
  generalize->add_option("--noise", gen.noise_max, "largest perturbation scale");
  generalize->add_option("--seed", gen.seed, "seed");
  generalize->add_flag("--scatter", scatter, "include the per-estimate errors");

  std::size_t oracle_cases = 100;
  std::uint64_t oracle_seed = 1;
  auto* oracle = app.add_subcommand("oracle", "diff the fast paths against brute-force references");
  oracle->add_option("--cases", oracle_cases, "random cases per comparison");
  oracle->add_option("--seed", oracle_seed, "seed");

#ifdef PREFREGRET_WITH_SERVICE
  std::string host = "127.0.0.1";
  int port = 8080;
  std::string data_dir = "sessions";
  auto* serve = app.add_subcommand("serve", "serve the HTTP session API");
  serve->add_option("--host", host, "bind address");
  serve->add_option("--port", port, "port");
  serve->add_option("--data-dir", data_dir, "session snapshot directory");
#endif

  CLI11_PARSE(app, argc, argv);
  try {
    if (*run) return cmd_run(run_opts, run_json);
    if (*exp) return cmd_experiment(exp_opts, output, summary);
    if (*generalize) return cmd_generalize(gen_config, gen, scatter);
    if (*oracle) return cmd_oracle(oracle_cases, oracle_seed);
#ifdef PREFREGRET_WITH_SERVICE
    if (*serve) return cmd_serve(host, port, data_dir);
#endif
  } catch (const ConfigError& e) {
    std::fprintf(stderr, "error: %s: %s\n", e.field().c_str(), e.what());
    return 2;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 0;
}
