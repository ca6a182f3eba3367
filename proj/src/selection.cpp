#include "prefregret/selection.hpp"

#include <algorithm>
#include <cmath>

#include "prefregret/core_model.hpp"
#include "prefregret/errors.hpp"
#include "prefregret/rng.hpp"

namespace prefregret {

namespace {

std::vector<int> classes_of(std::span<const Hypothesis> hyps) {
  std::vector<const Path*> paths;
  paths.reserve(hyps.size());
  for (const Hypothesis& h : hyps) paths.push_back(&h.opt_path);
  return path_classes(paths);
}

std::vector<double> hypothesis_costs(std::span<const Hypothesis> hyps) {
  const std::size_t n = hyps.size();
  const std::size_t d = hyps.front().weight.size();
  std::vector<double> features(n * d);
  std::vector<double> weights(n * d);
  for (std::size_t i = 0; i < n; ++i) {
    if (hyps[i].opt_path.features.size() != d || hyps[i].weight.size() != d) {
      throw ContractViolation("hypothesis " + std::to_string(i) + " has mismatched dimension");
    }
    std::copy(hyps[i].opt_path.features.begin(), hyps[i].opt_path.features.end(),
              features.begin() + static_cast<std::ptrdiff_t>(i * d));
    std::copy(hyps[i].weight.begin(), hyps[i].weight.end(),
              weights.begin() + static_cast<std::ptrdiff_t>(i * d));
  }
  std::vector<double> costs(n * n);
  kernels::parallel::cost_matrix(features, weights, n, d, costs);
  return costs;
}

double unit_scale(const WeightVector& w) {
  const double n = norm(w);
  return n > 0.0 ? n : 1.0;
}

bool any_distinct(std::span<const int> classes) {
  return std::any_of(classes.begin(), classes.end(), [&](int c) { return c != classes[0]; });
}

Selection finish(const kernels::BestPair& best) {
  Selection s;
  if (!best.found()) return s;
  s.status = best.score > 0.0 ? SelectionStatus::Selected : SelectionStatus::NearConverged;
  s.pair = QueryPair{best.a, best.b, best.score};
  return s;
}

void require_two(const BeliefState& belief) {
  if (belief.size() < 2) throw ContractViolation("selection needs at least two hypotheses");
}

}  // namespace

RegretTable RegretTable::build(std::span<const Hypothesis> hypotheses, const Environment& env) {
  if (hypotheses.empty()) throw ContractViolation("regret table: no hypotheses");
  RegretTable t;
  t.n = hypotheses.size();
  t.mode = env.mode();
  t.cost = hypothesis_costs(hypotheses);
  t.offset.resize(t.n);
  t.weight_norm.resize(t.n);
  std::vector<double> opt(t.n);
  for (std::size_t j = 0; j < t.n; ++j) {
    t.offset[j] = env.reward_offset(hypotheses[j].weight);
    t.weight_norm[j] = unit_scale(hypotheses[j].weight);
    opt[j] = hypotheses[j].opt_cost;
  }
  t.regret.resize(t.n * t.n);
  kernels::parallel::regret_matrix(t.cost, opt, t.offset, t.mode, t.n, t.regret);
  t.path_class = classes_of(hypotheses);
  return t;
}

bool RegretTable::has_distinct_pair() const { return any_distinct(path_class); }

namespace {

EntropyTable build_entropy(std::vector<double> const& costs, std::span<const double> norms,
                           std::span<const int> classes, ObjectiveMode mode, std::size_t n) {
  EntropyTable t;
  t.n = n;
  std::vector<std::size_t> rep;  // smallest hypothesis index of each class
  for (std::size_t i = 0; i < n; ++i) {
    const auto c = static_cast<std::size_t>(classes[i]);
    if (c >= rep.size()) rep.resize(c + 1, n);
    rep[c] = std::min(rep[c], i);
  }
  std::sort(rep.begin(), rep.end());
  for (std::size_t x = 0; x < rep.size(); ++x) {
    for (std::size_t y = x + 1; y < rep.size(); ++y) t.pairs.push_back({rep[x], rep[y]});
  }
  t.answer.resize(t.pairs.size() * n);
  t.cond_entropy.resize(t.pairs.size() * n);
  kernels::parallel::answer_tables(costs, norms, t.pairs, mode, n, t.answer, t.cond_entropy);
  return t;
}

}  // namespace

EntropyTable EntropyTable::build(const RegretTable& table) {
  return build_entropy(table.cost, table.weight_norm, table.path_class, table.mode, table.n);
}

double prob_symmetric_regret(std::size_t a, std::size_t b, const BeliefState& belief,
                             const Environment& env) {
  if (a >= belief.size() || b >= belief.size()) throw ContractViolation("hypothesis index out of range");
  const std::vector<double> m = belief.masses();
  const Hypothesis& ha = belief[a];
  const Hypothesis& hb = belief[b];
  const double r_ab = regret_ratio(cost(ha.opt_path, hb.weight), hb.opt_cost,
                                   env.reward_offset(hb.weight), env.mode());
  const double r_ba = regret_ratio(cost(hb.opt_path, ha.weight), ha.opt_cost,
                                   env.reward_offset(ha.weight), env.mode());
  return m[a] * m[b] * (r_ab + r_ba);
}

double information_gain(std::size_t a, std::size_t b, const BeliefState& belief) {
  if (a >= belief.size() || b >= belief.size()) throw ContractViolation("hypothesis index out of range");
  const std::vector<double> m = belief.masses();
  const double sign = belief.mode() == ObjectiveMode::Reward ? 1.0 : -1.0;
  double marginal = 0.0;
  double expected = 0.0;
  for (std::size_t j = 0; j < belief.size(); ++j) {
    const WeightVector& w = belief[j].weight;
    const double q =
        kernels::logistic(sign * (cost(belief[a].opt_path, w) - cost(belief[b].opt_path, w)) / unit_scale(w));
    marginal += m[j] * q;
    expected += m[j] * kernels::binary_entropy(q);
  }
  return kernels::binary_entropy(marginal) - expected;
}

Selection select_max_regret(const BeliefState& belief, const RegretTable& table) {
  require_two(belief);
  if (table.n != belief.size()) throw ContractViolation("regret table does not match belief");
  if (!table.has_distinct_pair()) return {};
  const std::vector<double> m = belief.masses();
  return finish(kernels::parallel::best_weighted_pair(table.regret, table.path_class, m, table.n));
}

Selection select_max_regret(const BeliefState& belief, const Environment& env) {
  require_two(belief);
  return select_max_regret(belief, RegretTable::build(belief.hypotheses(), env));
}

Selection select_entropy(const BeliefState& belief, const EntropyTable& table) {
  require_two(belief);
  if (table.n != belief.size()) throw ContractViolation("entropy table does not match belief");
  if (table.pairs.empty()) return {};
  const std::vector<double> m = belief.masses();
  return finish(kernels::parallel::best_information_gain(table.answer, table.cond_entropy,
                                                         table.pairs, m, table.n));
}

Selection select_entropy(const BeliefState& belief) {
  require_two(belief);
  const auto& hyps = belief.hypotheses();
  const std::vector<int> classes = classes_of(hyps);
  std::vector<double> norms;
  for (const Hypothesis& h : hyps) norms.push_back(unit_scale(h.weight));
  return select_entropy(belief, build_entropy(hypothesis_costs(hyps), norms, classes, belief.mode(), hyps.size()));
}

Selection select_random(const BeliefState& belief, std::uint64_t seed) {
  require_two(belief);
  const std::vector<int> classes = classes_of(belief.hypotheses());
  if (!any_distinct(classes)) return {};
  Rng rng(seed);
  const std::size_t n = belief.size();
  for (;;) {
    std::size_t i = rng.index(n);
    std::size_t j = rng.index(n - 1);
    if (j >= i) ++j;
    if (classes[i] == classes[j]) continue;
    if (j < i) std::swap(i, j);
    return Selection{SelectionStatus::Selected, QueryPair{i, j, 0.0}};
  }
}

Selection max_regret_feasible(const FeedbackSequence& feedback, std::span<const Hypothesis> omega,
                              const WeightBounds& bounds, const RegretTable& table) {
  if (table.n != omega.size()) throw ContractViolation("regret table does not match omega");
  std::vector<char> active(omega.size());
  for (std::size_t i = 0; i < omega.size(); ++i) {
    active[i] = feasible(feedback, omega[i].weight, bounds) ? 1 : 0;
  }
  const kernels::BestPair best =
      kernels::parallel::best_masked_pair(table.regret, table.path_class, active, table.n);
  if (!best.found()) return {};
  return Selection{SelectionStatus::Selected, QueryPair{best.a, best.b, best.score}};
}

Selection max_regret_feasible(const FeedbackSequence& feedback, std::span<const Hypothesis> omega,
                              const WeightBounds& bounds, const Environment& env) {
  return max_regret_feasible(feedback, omega, bounds, RegretTable::build(omega, env));
}

}  // namespace prefregret
