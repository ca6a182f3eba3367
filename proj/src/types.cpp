#include "prefregret/types.hpp"

#include <cmath>
#include <map>
#include <string>

#include "prefregret/errors.hpp"

namespace prefregret {

const char* to_string(ObjectiveMode mode) {
  return mode == ObjectiveMode::Cost ? "cost" : "reward";
}

double dot(const FeatureVector& phi, const WeightVector& w) {
  if (phi.size() != w.size()) {
    throw ContractViolation("dimension mismatch: features have " + std::to_string(phi.size()) +
                            " entries, weights " + std::to_string(w.size()));
  }
  double s = 0.0;
  for (std::size_t i = 0; i < phi.size(); ++i) s += phi[i] * w[i];
  return s;
}

double norm(const WeightVector& w) {
  double s = 0.0;
  for (double v : w) s += v * v;
  return std::sqrt(s);
}

bool all_finite(std::span<const double> values) {
  for (double v : values) {
    if (!std::isfinite(v)) return false;
  }
  return true;
}

WeightBounds WeightBounds::box(std::size_t d, double lo, double hi) {
  return WeightBounds{WeightVector(d, lo), WeightVector(d, hi)};
}

bool WeightBounds::contains(const WeightVector& w, double tol) const {
  if (w.size() != size()) return false;
  for (std::size_t i = 0; i < w.size(); ++i) {
    if (w[i] < lower[i] - tol || w[i] > upper[i] + tol) return false;
  }
  return true;
}

void WeightBounds::validate() const {
  if (lower.size() != upper.size()) throw ContractViolation("bounds: lower/upper length differ");
  if (lower.empty()) throw ContractViolation("bounds: empty");
  if (!all_finite(lower.span()) || !all_finite(upper.span())) {
    throw ContractViolation("bounds: non-finite entry");
  }
  for (std::size_t i = 0; i < lower.size(); ++i) {
    if (lower[i] > upper[i]) {
      throw ContractViolation("bounds: lower > upper at index " + std::to_string(i));
    }
  }
}

bool same_path(const Path& a, const Path& b) {
  if (!a.controls.empty() || !b.controls.empty()) return a.controls == b.controls;
  return a.states == b.states;
}

std::vector<int> path_classes(std::span<const Path* const> paths) {
  std::vector<int> ids(paths.size(), -1);
  std::map<std::vector<double>, int> seen;
  for (std::size_t i = 0; i < paths.size(); ++i) {
    std::vector<double> key;
    const Path& p = *paths[i];
    if (!p.controls.empty()) {
      key = p.controls;
      key.push_back(-1.0);
    } else {
      for (const State& s : p.states) {
        key.push_back(static_cast<double>(s.size()));
        key.insert(key.end(), s.begin(), s.end());
      }
    }
    auto [it, inserted] = seen.emplace(std::move(key), static_cast<int>(seen.size()));
    ids[i] = it->second;
  }
  return ids;
}

}  // namespace prefregret
