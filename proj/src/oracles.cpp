#include "prefregret/oracles.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <memory>
#include <string>

#include "prefregret/driver.hpp"
#include "prefregret/errors.hpp"
#include "prefregret/selection.hpp"

namespace prefregret::oracle {

namespace {

double inner(const FeatureVector& phi, const WeightVector& w) {
  double s = 0.0;
  for (std::size_t k = 0; k < phi.size(); ++k) s += phi[k] * w[k];
  return s;
}

bool identical(const Path& a, const Path& b) {
  if (!a.controls.empty() || !b.controls.empty()) return a.controls == b.controls;
  return a.states == b.states;
}

double ratio(double c, double opt, double offset, ObjectiveMode mode) {
  if (mode == ObjectiveMode::Cost) return c / opt;
  return 1.0 - (c - offset) / (opt - offset);
}

double sigmoid(double x) {
  if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
  const double e = std::exp(x);
  return e / (1.0 + e);
}

double entropy_bits(double q) {
  if (q <= 0.0 || q >= 1.0) return 0.0;
  return -(q * std::log2(q) + (1.0 - q) * std::log2(1.0 - q));
}

auto distinct_paths(std::span<const Hypothesis> hyps) {
  return [hyps](std::size_t i, std::size_t j) { return !identical(hyps[i].opt_path, hyps[j].opt_path); };
}

/// True iff no earlier hypothesis has the same optimal path.
std::vector<char> first_occurrences(std::span<const Hypothesis> hyps) {
  std::vector<char> first(hyps.size(), 1);
  for (std::size_t i = 0; i < hyps.size(); ++i) {
    for (std::size_t k = 0; k < i && first[i]; ++k) {
      if (identical(hyps[k].opt_path, hyps[i].opt_path)) first[i] = 0;
    }
  }
  return first;
}

/// First maximum in (i, j) lexicographic order over distinct-path pairs.
template <class Score, class Allowed, class AllowedPair>
std::optional<IndexPair> argmax_pairs(std::span<const Hypothesis> hyps, Allowed allowed, AllowedPair allowed_pair,
                                      Score score) {
  std::optional<IndexPair> best;
  double best_score = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < hyps.size(); ++i) {
    for (std::size_t j = i + 1; j < hyps.size(); ++j) {
      if (!allowed(i) || !allowed(j) || !allowed_pair(i, j)) continue;
      const double s = score(i, j);
      if (!best || s > best_score) {
        best = IndexPair{i, j};
        best_score = s;
      }
    }
  }
  return best;
}

}  // namespace

GridOptimum grid_brute_optimum(const grid::GridMap& map, const WeightVector& w, std::size_t task, std::size_t cap) {
  const std::vector<grid::LatticePath> paths = grid::enumerate_paths(map, cap, task);
  if (paths.empty()) throw PlannerError("no path between start and goal");
  GridOptimum best;
  best.cost = std::numeric_limits<double>::infinity();
  best.path_count = paths.size();
  for (const grid::LatticePath& p : paths) {
    const double c = inner(grid::grid_features(map, p), w);
    if (c < best.cost) {
      best.cost = c;
      best.path = p;
    }
  }
  return best;
}

std::optional<IndexPair> brute_max_regret(std::span<const Hypothesis> hyps, std::span<const double> masses,
                                          const Environment& env) {
  const ObjectiveMode mode = env.mode();
  std::vector<double> offset(hyps.size());
  for (std::size_t j = 0; j < hyps.size(); ++j) offset[j] = env.reward_offset(hyps[j].weight);
  auto r = [&](std::size_t p, std::size_t q) {
    return ratio(inner(hyps[p].opt_path.features, hyps[q].weight), hyps[q].opt_cost, offset[q], mode);
  };
  return argmax_pairs(
      hyps, [](std::size_t) { return true; }, distinct_paths(hyps),
      [&](std::size_t i, std::size_t j) { return masses[i] * masses[j] * (r(i, j) + r(j, i)); });
}

std::optional<IndexPair> brute_entropy(std::span<const Hypothesis> hyps, std::span<const double> masses,
                                       ObjectiveMode mode) {
  // One question per pair of distinct paths, asked with the earliest hypothesis of each path.
  const double sign = mode == ObjectiveMode::Reward ? 1.0 : -1.0;
  const std::vector<char> first = first_occurrences(hyps);
  return argmax_pairs(
      hyps, [&](std::size_t i) { return first[i] != 0; }, distinct_paths(hyps),
      [&](std::size_t a, std::size_t b) {
        double marginal = 0.0;
        double expected = 0.0;
        for (std::size_t j = 0; j < hyps.size(); ++j) {
          const double ca = inner(hyps[a].opt_path.features, hyps[j].weight);
          const double cb = inner(hyps[b].opt_path.features, hyps[j].weight);
          double len = 0.0;
          for (double x : hyps[j].weight) len += x * x;
          len = len > 0.0 ? std::sqrt(len) : 1.0;
          const double q = sigmoid(sign * (ca - cb) / len);
          marginal += masses[j] * q;
          expected += masses[j] * entropy_bits(q);
        }
        return entropy_bits(marginal) - expected;
      });
}

std::optional<IndexPair> brute_feasible(const FeedbackSequence& feedback, std::span<const Hypothesis> hyps,
                                        const WeightBounds& bounds, const Environment& env) {
  const ObjectiveMode mode = env.mode();
  std::vector<char> active(hyps.size(), 1);
  for (std::size_t i = 0; i < hyps.size(); ++i) {
    const WeightVector& w = hyps[i].weight;
    for (std::size_t k = 0; k < w.size(); ++k) {
      if (w[k] < bounds.lower[k] || w[k] > bounds.upper[k]) active[i] = 0;
    }
    for (const FeedbackRecord& rec : feedback.records()) {
      const double d = inner(rec.delta, w);
      if (mode == ObjectiveMode::Cost ? d > 1e-9 : d < -1e-9) active[i] = 0;
    }
  }
  std::vector<double> offset(hyps.size());
  for (std::size_t j = 0; j < hyps.size(); ++j) offset[j] = env.reward_offset(hyps[j].weight);
  auto r = [&](std::size_t p, std::size_t q) {
    return ratio(inner(hyps[p].opt_path.features, hyps[q].weight), hyps[q].opt_cost, offset[q], mode);
  };
  return argmax_pairs(
      hyps, [&](std::size_t i) { return active[i] != 0; }, distinct_paths(hyps),
      [&](std::size_t i, std::size_t j) { return r(i, j) + r(j, i); });
}

std::vector<double> product_posterior(std::span<const Hypothesis> hyps, std::span<const FeedbackRecord> records,
                                      double p, ObjectiveMode mode) {
  std::vector<double> post(hyps.size(), 1.0);
  for (std::size_t i = 0; i < hyps.size(); ++i) {
    for (const FeedbackRecord& rec : records) {
      const double d = inner(rec.delta, hyps[i].weight);
      const bool agrees = mode == ObjectiveMode::Cost ? d <= 0.0 : d >= 0.0;
      post[i] *= agrees ? p : 1.0 - p;
    }
  }
  double z = 0.0;
  for (double x : post) z += x;
  if (!(z > 0.0)) throw RenormalizationError(records.size(), "product posterior vanished");
  for (double& x : post) x /= z;
  return post;
}

grid::GridMap random_small_map(Rng& rng, int max_side) {
  if (max_side < 2) throw ContractViolation("random_small_map: max_side must be at least 2");
  grid::GridMap map;
  map.width = 2 + static_cast<int>(rng.index(static_cast<std::size_t>(max_side - 1)));
  map.height = 2 + static_cast<int>(rng.index(static_cast<std::size_t>(max_side - 1)));
  const auto cells = static_cast<std::size_t>(map.width * map.height);
  const std::size_t regions = 1 + rng.index(4);
  for (std::size_t r = 0; r < regions; ++r) {
    grid::Region region;
    region.id = static_cast<int>(r);
    const std::size_t size = 1 + rng.index(std::max<std::size_t>(1, cells / 2));
    std::vector<char> taken(cells, 0);
    while (region.cells.size() < size) {
      const std::size_t c = rng.index(cells);
      if (taken[c]) continue;
      taken[c] = 1;
      region.cells.push_back({static_cast<int>(c) % map.width, static_cast<int>(c) / map.width});
    }
    map.regions.push_back(std::move(region));
  }
  const std::size_t start = rng.index(cells);
  std::size_t goal = rng.index(cells - 1);
  if (goal >= start) ++goal;
  map.tasks.push_back({{static_cast<int>(start) % map.width, static_cast<int>(start) / map.width},
                       {static_cast<int>(goal) % map.width, static_cast<int>(goal) / map.width}});
  map.bounds = WeightBounds::box(map.dimension(), 0.0, 1.0);
  map.bounds.lower[regions] = 0.05;
  map.validate();
  return map;
}

namespace {

WeightVector draw_in(const WeightBounds& b, Rng& rng) {
  WeightVector w(b.size());
  for (std::size_t i = 0; i < w.size(); ++i) w[i] = rng.uniform(b.lower[i], b.upper[i]);
  return w;
}

std::string describe(std::size_t c, const std::optional<IndexPair>& want, const std::optional<std::size_t>& a,
                     const std::optional<std::size_t>& b) {
  auto pair = [](std::optional<std::size_t> x, std::optional<std::size_t> y) {
    return x ? "(" + std::to_string(*x) + "," + std::to_string(*y) + ")" : std::string("none");
  };
  return "case " + std::to_string(c) + ": brute " +
         (want ? pair(want->first, want->second) : std::string("none")) + ", fast " + pair(a, b);
}

void record(Comparison& cmp, std::size_t c, const std::optional<IndexPair>& want, const Selection& got) {
  ++cmp.cases;
  const bool same = want.has_value() == got.pair.has_value() &&
                    (!want || (want->first == got.pair->a && want->second == got.pair->b));
  if (same) return;
  ++cmp.mismatches;
  if (cmp.first_mismatch.empty()) {
    cmp.first_mismatch = describe(c, want, got.pair ? std::optional(got.pair->a) : std::nullopt,
                                  got.pair ? std::optional(got.pair->b) : std::nullopt);
  }
}

std::shared_ptr<const Environment> small_driver() {
  driver::DriverScene scene = driver::standard_scene(false, 0);
  scene.candidate_count = 40;
  return std::make_shared<driver::DriverEnvironment>(scene, driver::PlanOptions{false, 0});
}

}  // namespace

Comparison compare_grid_planner(std::size_t cases, std::uint64_t seed, int max_side) {
  Comparison cmp{"grid planner vs enumeration"};
  Rng rng(seed);
  for (std::size_t c = 0; c < cases; ++c) {
    const grid::GridMap map = random_small_map(rng, max_side);
    const WeightVector w = draw_in(map.bounds, rng);
    const GridOptimum brute = grid_brute_optimum(map, w);
    const grid::GridPlan fast = grid::grid_optimal_path(map, w);
    const double fast_cost = inner(grid::grid_features(map, fast.path), w);
    ++cmp.cases;
    if (fast_cost != brute.cost) {
      ++cmp.mismatches;
      if (cmp.first_mismatch.empty()) {
        cmp.first_mismatch = "case " + std::to_string(c) + ": brute " + std::to_string(brute.cost) + ", planner " +
                             std::to_string(fast_cost);
      }
    }
  }
  return cmp;
}

std::vector<Comparison> compare_selectors(std::size_t cases, std::uint64_t seed, std::size_t max_omega) {
  if (max_omega < 2) throw ContractViolation("compare_selectors: max_omega must be at least 2");
  std::vector<Comparison> out{{"max-regret selector vs brute force"},
                              {"entropy selector vs brute force"},
                              {"feasible max-regret selector vs brute force"}};
  const std::shared_ptr<const Environment> road = small_driver();
  Rng rng(seed);
  for (std::size_t c = 0; c < cases; ++c) {
    std::shared_ptr<const Environment> env = road;
    if (c % 2 == 0) env = std::make_shared<grid::GridEnvironment>(random_small_map(rng, 4));
    const std::size_t n = 2 + rng.index(max_omega - 1);
    std::vector<Hypothesis> omega = sample_omega(*env, env->bounds(), n, rng.next());
    BeliefState belief(omega, rng.uniform(0.55, 0.95), env->mode());
    const std::size_t answers = rng.index(4);
    for (std::size_t k = 0; k < answers; ++k) {
      const std::size_t a = rng.index(n);
      const std::size_t b = rng.index(n);
      belief = update(std::move(belief), make_record(omega[a].opt_path, omega[b].opt_path));
    }
    std::vector<double> logs(n);
    for (double& x : logs) x = rng.uniform(-6.0, 0.0);
    belief.set_log_masses(logs);
    const std::vector<double> m = belief.masses();

    record(out[0], c, brute_max_regret(omega, m, *env), select_max_regret(belief, *env));
    record(out[1], c, brute_entropy(omega, m, env->mode()), select_entropy(belief));
    record(out[2], c, brute_feasible(belief.feedback(), omega, env->bounds(), *env),
           max_regret_feasible(belief.feedback(), omega, env->bounds(), *env));
  }
  return out;
}

Comparison compare_belief_updates(std::size_t cases, std::uint64_t seed, double tol) {
  Comparison cmp{"belief update vs product posterior"};
  Rng rng(seed);
  for (std::size_t c = 0; c < cases; ++c) {
    const grid::GridEnvironment env(random_small_map(rng, 4));
    const std::size_t n = 2 + rng.index(9);
    std::vector<Hypothesis> omega = sample_omega(env, env.bounds(), n, rng.next());
    const double p = rng.uniform(0.55, 0.99);
    BeliefState belief(omega, p, env.mode());
    std::vector<FeedbackRecord> records;
    const std::size_t length = rng.index(11);
    for (std::size_t k = 0; k < length; ++k) {
      const std::size_t a = rng.index(n);
      const std::size_t b = rng.index(n);
      records.push_back(make_record(omega[a].opt_path, omega[b].opt_path));
      belief = update(std::move(belief), records.back());
    }
    const std::vector<double> want = product_posterior(omega, records, p, env.mode());
    const std::vector<double> got = belief.masses();
    double worst = 0.0;
    for (std::size_t i = 0; i < n; ++i) worst = std::max(worst, std::abs(want[i] - got[i]));
    ++cmp.cases;
    if (!(worst <= tol)) {
      ++cmp.mismatches;
      if (cmp.first_mismatch.empty()) {
        cmp.first_mismatch = "case " + std::to_string(c) + ": max deviation " + std::to_string(worst);
      }
    }
  }
  return cmp;
}

}  // namespace prefregret::oracle
