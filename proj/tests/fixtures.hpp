#pragma once

#include <string>
#include <vector>

#include "scenepath/scene.hpp"

namespace fixtures {

using scenepath::Vec2;

/// Flat scene of rows x cols nodes at `cell` spacing from the origin.
inline scenepath::Scene flat(int rows, int cols, double cell = 0.25) {
  scenepath::Scene s;
  s.heightmap = scenepath::HeightMap::flat({0.0, 0.0}, cell, rows, cols);
  return s;
}

inline void add_landmark(scenepath::Scene& s, const std::string& name, std::vector<Vec2> cells) {
  s.landmarks.push_back({name, std::move(cells)});
}

inline void add_wall(scenepath::Scene& s, Vec2 lo, Vec2 hi) {
  s.static_obstacles.push_back({scenepath::make_rect(lo, hi)});
}

inline void add_top(scenepath::Scene& s, Vec2 lo, Vec2 hi, double clearance) {
  s.top_obstacles.push_back({scenepath::make_rect(lo, hi), clearance});
}

}  // namespace fixtures
