#pragma once

#include <cstddef>
#include <initializer_list>
#include <optional>
#include <span>
#include <vector>

namespace prefregret {

enum class ObjectiveMode { Cost, Reward };

const char* to_string(ObjectiveMode mode);

/// Fixed-length real vector; the tag keeps weights and features apart.
template <class Tag>
class RealVector {
 public:
  RealVector() = default;
  explicit RealVector(std::size_t n, double fill = 0.0) : values_(n, fill) {}
  explicit RealVector(std::vector<double> values) : values_(std::move(values)) {}
  RealVector(std::initializer_list<double> values) : values_(values) {}

  std::size_t size() const noexcept { return values_.size(); }
  bool empty() const noexcept { return values_.empty(); }
  double& operator[](std::size_t i) { return values_[i]; }
  double operator[](std::size_t i) const { return values_[i]; }
  auto begin() noexcept { return values_.begin(); }
  auto end() noexcept { return values_.end(); }
  auto begin() const noexcept { return values_.begin(); }
  auto end() const noexcept { return values_.end(); }
  std::span<const double> span() const noexcept { return values_; }
  const std::vector<double>& values() const noexcept { return values_; }

  bool operator==(const RealVector&) const = default;

 private:
  std::vector<double> values_;
};

struct WeightTag {};
struct FeatureTag {};
using WeightVector = RealVector<WeightTag>;
using FeatureVector = RealVector<FeatureTag>;

/// phi . w; throws ContractViolation on dimension mismatch.
double dot(const FeatureVector& phi, const WeightVector& w);
double norm(const WeightVector& w);
bool all_finite(std::span<const double> values);

/// Axis-aligned box l_i <= w_i <= u_i.
struct WeightBounds {
  WeightVector lower;
  WeightVector upper;

  static WeightBounds box(std::size_t d, double lo, double hi);

  std::size_t size() const noexcept { return lower.size(); }
  bool contains(const WeightVector& w, double tol = 0.0) const;
  /// Throws ContractViolation unless lengths agree, entries are finite and l <= u.
  void validate() const;
};

using State = std::vector<double>;

/// A finite trajectory from the episode start with its cached features.
///
/// Lattice paths store one {x, y} state per cell and no controls. Driver
/// trajectories additionally carry the flattened control sequence, which is
/// what identifies them (see `same_path`).
struct Path {
  std::vector<State> states;
  std::vector<double> controls;
  FeatureVector features;
  std::optional<WeightVector> optimal_for;
};

/// Identity: control sequence when present, otherwise the state sequence.
bool same_path(const Path& a, const Path& b);

/// Assigns equal ids to identical paths; ids are dense and in first-seen order.
std::vector<int> path_classes(std::span<const Path* const> paths);

}  // namespace prefregret
