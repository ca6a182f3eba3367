#include <cmath>

#include "prefregret/core_model.hpp"
#include "prefregret/kernels.hpp"

namespace prefregret::kernels {

bool BestPair::beats(double s, std::size_t i, std::size_t j) const noexcept {
  if (!found()) return true;
  if (s != score) return s > score;
  return i < a || (i == a && j < b);
}

void BestPair::offer(double s, std::size_t i, std::size_t j) noexcept {
  if (beats(s, i, j)) {
    score = s;
    a = i;
    b = j;
  }
}

double binary_entropy(double q) {
  if (q <= 0.0 || q >= 1.0) return 0.0;
  return -(q * std::log2(q) + (1.0 - q) * std::log2(1.0 - q));
}

double logistic(double x) {
  if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
  const double e = std::exp(x);
  return e / (1.0 + e);
}

namespace serial {

void cost_matrix(std::span<const double> features, std::span<const double> weights, std::size_t n,
                 std::size_t d, std::span<double> out) {
  for (std::size_t i = 0; i < n; ++i) {
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
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      out[i * n + j] = regret_ratio(costs[i * n + j], opt_costs[j], offsets[j], mode);
    }
  }
}

BestPair best_weighted_pair(std::span<const double> regret, std::span<const int> classes,
                            std::span<const double> masses, std::size_t n) {
  BestPair best;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      if (classes[i] == classes[j]) continue;
      best.offer(masses[i] * masses[j] * (regret[i * n + j] + regret[j * n + i]), i, j);
    }
  }
  return best;
}

BestPair best_masked_pair(std::span<const double> regret, std::span<const int> classes,
                          std::span<const char> active, std::size_t n) {
  BestPair best;
  for (std::size_t i = 0; i < n; ++i) {
    if (!active[i]) continue;
    for (std::size_t j = i + 1; j < n; ++j) {
      if (!active[j] || classes[i] == classes[j]) continue;
      best.offer(regret[i * n + j] + regret[j * n + i], i, j);
    }
  }
  return best;
}

void answer_tables(std::span<const double> costs, std::span<const double> norms,
                   std::span<const ClassPair> pairs, ObjectiveMode mode, std::size_t n,
                   std::span<double> answer,
                   std::span<double> cond_entropy) {
  const double sign = mode == ObjectiveMode::Reward ? 1.0 : -1.0;
  for (std::size_t p = 0; p < pairs.size(); ++p) {
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
  for (std::size_t p = 0; p < pairs.size(); ++p) {
    const double* q = answer.data() + p * n;
    const double* h = cond_entropy.data() + p * n;
    double marginal = 0.0;
    double expected = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
      marginal += masses[j] * q[j];
      expected += masses[j] * h[j];
    }
    best.offer(binary_entropy(marginal) - expected, pairs[p].a, pairs[p].b);
  }
  return best;
}

}  // namespace serial
}  // namespace prefregret::kernels
