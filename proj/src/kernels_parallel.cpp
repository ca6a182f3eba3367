#include <cmath>
#include <cstddef>

#include "prefregret/core_model.hpp"
#include "prefregret/kernels.hpp"

namespace prefregret::kernels::parallel {

namespace {
using Index = std::ptrdiff_t;

Index as_index(std::size_t n) { return static_cast<Index>(n); }
}  // namespace

void cost_matrix(std::span<const double> features, std::span<const double> weights, std::size_t n,
                 std::size_t d, std::span<double> out) {
#pragma omp parallel for schedule(static)
  for (Index i = 0; i < as_index(n); ++i) {
    const double* phi = features.data() + i * d;
    for (std::size_t j = 0; j < n; ++j) {
      const double* w = weights.data() + j * d;
      double s = 0.0;
      for (std::size_t k = 0; k < d; ++k) s += phi[k] * w[k];
      out[i * n + j] = s;
    }
  }
}

void regret_matrix(std::span<const double> costs, std::span<const double> opt_costs,
                   std::span<const double> offsets, ObjectiveMode mode, std::size_t n,
                   std::span<double> out) {
  // regret_ratio throws on a degenerate denominator; check once up front so
  // no exception has to cross the parallel region.
  for (std::size_t j = 0; j < n; ++j) (void)regret_ratio(opt_costs[j], opt_costs[j], offsets[j], mode);
#pragma omp parallel for schedule(static)
  for (Index i = 0; i < as_index(n); ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      out[i * n + j] = regret_ratio(costs[i * n + j], opt_costs[j], offsets[j], mode);
    }
  }
}

BestPair best_weighted_pair(std::span<const double> regret, std::span<const int> classes,
                            std::span<const double> masses, std::size_t n) {
  BestPair best;
#pragma omp parallel
  {
    BestPair local;
#pragma omp for schedule(dynamic, 8) nowait
    for (Index ii = 0; ii < as_index(n); ++ii) {
      const auto i = static_cast<std::size_t>(ii);
      for (std::size_t j = i + 1; j < n; ++j) {
        if (classes[i] == classes[j]) continue;
        local.offer(masses[i] * masses[j] * (regret[i * n + j] + regret[j * n + i]), i, j);
      }
    }
#pragma omp critical(best_weighted_pair_merge)
    best.merge(local);
  }
  return best;
}

BestPair best_masked_pair(std::span<const double> regret, std::span<const int> classes,
                          std::span<const char> active, std::size_t n) {
  BestPair best;
#pragma omp parallel
  {
    BestPair local;
#pragma omp for schedule(dynamic, 8) nowait
    for (Index ii = 0; ii < as_index(n); ++ii) {
      const auto i = static_cast<std::size_t>(ii);
      if (!active[i]) continue;
      for (std::size_t j = i + 1; j < n; ++j) {
        if (!active[j] || classes[i] == classes[j]) continue;
        local.offer(regret[i * n + j] + regret[j * n + i], i, j);
      }
    }
#pragma omp critical(best_masked_pair_merge)
    best.merge(local);
  }
  return best;
}

void answer_tables(std::span<const double> costs, std::span<const double> norms,
                   std::span<const ClassPair> pairs, ObjectiveMode mode, std::size_t n,
                   std::span<double> answer,
                   std::span<double> cond_entropy) {
  const double sign = mode == ObjectiveMode::Reward ? 1.0 : -1.0;
#pragma omp parallel for schedule(static)
  for (Index p = 0; p < as_index(pairs.size()); ++p) {
    const double* ca = costs.data() + pairs[p].a * n;
    const double* cb = costs.data() + pairs[p].b * n;
    for (std::size_t j = 0; j < n; ++j) {
      const double q = logistic(sign * (ca[j] - cb[j]) / norms[j]);
      answer[p * n + j] = q;
      cond_entropy[p * n + j] = binary_entropy(q);
    }
  }
}

BestPair best_information_gain(std::span<const double> answer, std::span<const double> cond_entropy,
                               std::span<const ClassPair> pairs, std::span<const double> masses,
                               std::size_t n) {
  BestPair best;
#pragma omp parallel
  {
    BestPair local;
#pragma omp for schedule(static) nowait
    for (Index p = 0; p < as_index(pairs.size()); ++p) {
      const double* q = answer.data() + p * n;
      const double* h = cond_entropy.data() + p * n;
      double marginal = 0.0;
      double expected = 0.0;
      for (std::size_t j = 0; j < n; ++j) {
        marginal += masses[j] * q[j];
        expected += masses[j] * h[j];
      }
      local.offer(binary_entropy(marginal) - expected, pairs[p].a, pairs[p].b);
    }
#pragma omp critical(best_information_gain_merge)
    best.merge(local);
  }
  return best;
}

}  // namespace prefregret::kernels::parallel
