#pragma once

#include <memory>

#include "prefregret/gridworld.hpp"

namespace prefregret::testing {

/// 3 x 2 lattice from (0,0) to (2,0) with one region on the middle cell of
/// the bottom row. Going straight costs w0 + 2 wt, the cheapest detour 4 wt.
inline grid::GridMap corridor_map() {
  grid::GridMap m;
  m.width = 3;
  m.height = 2;
  m.regions = {{0, {{1, 0}}}};
  m.tasks = {{{0, 0}, {2, 0}}};
  m.bounds = WeightBounds{{0.0, 0.05}, {1.0, 1.0}};
  m.validate();
  return m;
}

/// side x side lattice, corner to corner, one region in the opposite corner.
inline grid::GridMap open_map(int side) {
  grid::GridMap m;
  m.width = side;
  m.height = side;
  m.regions = {{0, {{side - 1, 0}}}};
  m.tasks = {{{0, 0}, {side - 1, side - 1}}};
  m.bounds = WeightBounds{{0.0, 0.05}, {1.0, 1.0}};
  m.validate();
  return m;
}

inline std::shared_ptr<const grid::GridEnvironment> corridor_env() {
  return std::make_shared<grid::GridEnvironment>(corridor_map());
}

}  // namespace prefregret::testing
