#pragma once

// Data-parallel inner loops of query selection.
//
// Every kernel exists twice with identical signatures: `serial::` is the
// straightforward reference kept for testing and benchmarking, `parallel::`
// is the OpenMP version the library calls. Per-element arithmetic is the same
// in both, so results agree bit-for-bit; argmax reductions use a total order
// (score, then lowest index pair) that does not depend on thread scheduling.

#include <cstddef>
#include <limits>
#include <span>
#include <vector>

#include "prefregret/types.hpp"

namespace prefregret::kernels {

struct BestPair {
  double score = -std::numeric_limits<double>::infinity();
  std::size_t a = std::numeric_limits<std::size_t>::max();
  std::size_t b = std::numeric_limits<std::size_t>::max();

  bool found() const noexcept { return a != std::numeric_limits<std::size_t>::max(); }
  /// Higher score wins; equal scores go to the lexicographically smaller (a, b).
  bool beats(double s, std::size_t i, std::size_t j) const noexcept;
  void offer(double s, std::size_t i, std::size_t j) noexcept;
  void merge(const BestPair& other) noexcept { if (other.found()) offer(other.score, other.a, other.b); }
};

/// Representative hypothesis indices (a < b) of one distinct-path class pair.
struct ClassPair {
  std::size_t a;
  std::size_t b;
};

namespace serial {
/// out[i*n + j] = features[i] . weights[j]; both inputs row-major n x d.
void cost_matrix(std::span<const double> features, std::span<const double> weights,
                 std::size_t n, std::size_t d, std::span<double> out);
/// out[i*n + j] = regret of path i under weight j.
void regret_matrix(std::span<const double> costs, std::span<const double> opt_costs,
                   std::span<const double> offsets, ObjectiveMode mode, std::size_t n,
                   std::span<double> out);
/// argmax over i < j with class_i != class_j of m_i m_j (r_ij + r_ji).
BestPair best_weighted_pair(std::span<const double> regret, std::span<const int> classes,
                            std::span<const double> masses, std::size_t n);
/// argmax over active i < j with class_i != class_j of r_ij + r_ji.
BestPair best_masked_pair(std::span<const double> regret, std::span<const int> classes,
                          std::span<const char> active, std::size_t n);
/// answer[p*n + j] = P(first path of pair p is chosen | w_j) under the softmax
/// model with w_j rescaled to unit norm (norms[j] = |w_j|); cond_entropy holds
/// its binary entropy in bits.
void answer_tables(std::span<const double> costs, std::span<const double> norms,
                   std::span<const ClassPair> pairs, ObjectiveMode mode, std::size_t n,
                   std::span<double> answer,
                   std::span<double> cond_entropy);
/// argmax over pairs of H(sum_j m_j q_pj) - sum_j m_j H(q_pj).
BestPair best_information_gain(std::span<const double> answer,
                               std::span<const double> cond_entropy,
                               std::span<const ClassPair> pairs,
                               std::span<const double> masses, std::size_t n);
}  // namespace serial

namespace parallel {
/// out[i*n + j] = features[i] . weights[j]; both inputs row-major n x d.
void cost_matrix(std::span<const double> features, std::span<const double> weights,
                 std::size_t n, std::size_t d, std::span<double> out);
/// out[i*n + j] = regret of path i under weight j.
void regret_matrix(std::span<const double> costs, std::span<const double> opt_costs,
                   std::span<const double> offsets, ObjectiveMode mode, std::size_t n,
                   std::span<double> out);
/// argmax over i < j with class_i != class_j of m_i m_j (r_ij + r_ji).
BestPair best_weighted_pair(std::span<const double> regret, std::span<const int> classes,
                            std::span<const double> masses, std::size_t n);
/// argmax over active i < j with class_i != class_j of r_ij + r_ji.
BestPair best_masked_pair(std::span<const double> regret, std::span<const int> classes,
                          std::span<const char> active, std::size_t n);
/// answer[p*n + j] = P(first path of pair p is chosen | w_j) under the softmax
/// model with w_j rescaled to unit norm (norms[j] = |w_j|); cond_entropy holds
/// its binary entropy in bits.
void answer_tables(std::span<const double> costs, std::span<const double> norms,
                   std::span<const ClassPair> pairs, ObjectiveMode mode, std::size_t n,
                   std::span<double> answer,
                   std::span<double> cond_entropy);
/// argmax over pairs of H(sum_j m_j q_pj) - sum_j m_j H(q_pj).
BestPair best_information_gain(std::span<const double> answer,
                               std::span<const double> cond_entropy,
                               std::span<const ClassPair> pairs,
                               std::span<const double> masses, std::size_t n);
}  // namespace parallel

/// Binary entropy in bits; 0 at q in {0, 1}.
double binary_entropy(double q);
/// Logistic function 1 / (1 + e^-x), evaluated without overflow.
double logistic(double x);

}  // namespace prefregret::kernels
