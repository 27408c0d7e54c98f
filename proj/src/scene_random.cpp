#include <algorithm>
#include <array>
#include <cmath>
#include <string>

#include "scenepath/error.hpp"
#include "scenepath/rng.hpp"
#include "scenepath/route_graph.hpp"
#include "scenepath/scene.hpp"

namespace scenepath {

namespace {

constexpr std::array kLandmarkNames{"tree", "lake", "car", "swing", "bench", "rock", "well", "gate",
                                    "tower", "shed", "fountain", "statue"};

struct Patch {
  Vec2 lo;
  Vec2 hi;
};

Patch random_patch(Rng& rng, const RandomSceneConfig& cfg) {
  const double w = rng.uniform(cfg.patch_min, cfg.patch_max);
  const double h = rng.uniform(cfg.patch_min, cfg.patch_max);
  const double x = rng.uniform(1.0, std::max(1.0, cfg.size_x - 1.0 - w));
  const double y = rng.uniform(1.0, std::max(1.0, cfg.size_y - 1.0 - h));
  return {{x, y}, {x + w, y + h}};
}

// Distance from p to the nearest edge of the patch, measured inward.
double inset(const Patch& p, Vec2 q) {
  return std::min({q.x - p.lo.x, p.hi.x - q.x, q.y - p.lo.y, p.hi.y - q.y});
}

Scene attempt(Rng& rng, const RandomSceneConfig& cfg) {
  Scene scene;
  const int cols = static_cast<int>(std::lround(cfg.size_x / cfg.cell_size)) + 1;
  const int rows = static_cast<int>(std::lround(cfg.size_y / cfg.cell_size)) + 1;
  scene.heightmap = HeightMap::flat({0.0, 0.0}, cfg.cell_size, rows, cols);
  HeightMap& hm = scene.heightmap;

  auto for_each_node = [&](const Patch& p, auto&& fn) {
    for (int r = 0; r < rows; ++r) {
      for (int c = 0; c < cols; ++c) {
        const Vec2 q = hm.node_position(r, c);
        if (q.x >= p.lo.x && q.x <= p.hi.x && q.y >= p.lo.y && q.y <= p.hi.y) fn(r, c, q);
      }
    }
  };

  for (int i = 0; i < cfg.slope_patches; ++i) {
    const Patch p = random_patch(rng, cfg);
    for_each_node(p, [&](int r, int c, Vec2 q) {
      hm.at(r, c) = std::max(hm.at(r, c), std::min(cfg.slope_plateau, cfg.slope_grade * inset(p, q)));
    });
  }
  for (int i = 0; i < cfg.stairs_patches; ++i) {
    const Patch p = random_patch(rng, cfg);
    const bool along_x = rng.uniform() < 0.5;
    for_each_node(p, [&](int r, int c, Vec2 q) {
      const double d = along_x ? std::min(q.x - p.lo.x, p.hi.x - q.x) : std::min(q.y - p.lo.y, p.hi.y - q.y);
      const double steps = std::min<double>(cfg.stair_steps, std::floor(d / cfg.stair_depth));
      hm.at(r, c) = steps * cfg.stair_height;
    });
  }
  for (int i = 0; i < cfg.rough_patches; ++i) {
    const Patch p = random_patch(rng, cfg);
    for_each_node(p, [&](int r, int c, Vec2) { hm.at(r, c) += rng.uniform(-cfg.rough_amplitude, cfg.rough_amplitude); });
  }

  for (int i = 0; i < cfg.walls; ++i) {
    const double len = rng.uniform(cfg.wall_min, cfg.wall_max);
    const bool along_x = rng.uniform() < 0.5;
    const double w = along_x ? len : cfg.wall_thickness;
    const double h = along_x ? cfg.wall_thickness : len;
    const double x = rng.uniform(0.5, cfg.size_x - 0.5 - w);
    const double y = rng.uniform(0.5, cfg.size_y - 0.5 - h);
    scene.static_obstacles.push_back({make_rect({x, y}, {x + w, y + h})});
  }
  for (int i = 0; i < cfg.top_obstacles; ++i) {
    const double w = rng.uniform(cfg.top_min, cfg.top_max);
    const double h = rng.uniform(cfg.top_min, cfg.top_max);
    const double x = rng.uniform(0.5, cfg.size_x - 0.5 - w);
    const double y = rng.uniform(0.5, cfg.size_y - 0.5 - h);
    const double clearance = cfg.top_clearances.empty()
                                 ? 1.2
                                 : cfg.top_clearances[rng.below(cfg.top_clearances.size())];
    scene.top_obstacles.push_back({make_rect({x, y}, {x + w, y + h}), clearance});
  }

  for (int i = 0; i < cfg.landmarks; ++i) {
    bool placed = false;
    for (int tries = 0; tries < 500 && !placed; ++tries) {
      const int r = 4 + static_cast<int>(rng.below(static_cast<std::uint64_t>(std::max(1, rows - 8))));
      const int c = 4 + static_cast<int>(rng.below(static_cast<std::uint64_t>(std::max(1, cols - 8))));
      const Vec2 q = hm.node_position(r, c);
      if (scene.static_clearance(q) < 1.0 || scene.clearance_at(q) < 1e9) continue;
      bool level = true;
      for (int dr = -1; dr <= 1; ++dr) {
        for (int dc = -1; dc <= 1; ++dc) level = level && std::abs(hm.at(r + dr, c + dc) - hm.at(r, c)) < 0.05;
      }
      if (!level) continue;
      bool far = true;
      for (const Landmark& l : scene.landmarks) far = far && distance(l.cells.front(), q) >= cfg.landmark_separation;
      if (!far) continue;
      Landmark lm;
      lm.name = i < static_cast<int>(kLandmarkNames.size()) ? kLandmarkNames[i] : "landmark" + std::to_string(i);
      lm.cells.push_back(q);
      for (int dr = -1; dr <= 1; ++dr) {
        for (int dc = -1; dc <= 1; ++dc) {
          if (dr != 0 || dc != 0) lm.cells.push_back(hm.node_position(r + dr, c + dc));
        }
      }
      scene.landmarks.push_back(std::move(lm));
      placed = true;
    }
    if (!placed) throw Error(ErrorKind::RetryExhausted, "randomize_scene", "could not place landmarks");
  }
  return scene;
}

}  // namespace

Scene randomize_scene(std::uint64_t seed, const RandomSceneConfig& config) {
  if (config.cell_size <= 0.0 || config.size_x < 4.0 || config.size_y < 4.0) {
    throw Error(ErrorKind::Validation, "randomize_scene", "extent must be at least 4 m and cell_size > 0");
  }
  for (int a = 0; a < std::max(1, config.retry_budget); ++a) {
    Rng rng = Rng::derive(seed, static_cast<std::uint64_t>(a));
    Scene scene;
    try {
      scene = attempt(rng, config);
      validate(scene);
    } catch (const Error&) {
      continue;
    }
    const GridGraph graph = build_graph(scene);
    const auto reach = reachability(graph, scene.landmarks);
    bool connected = true;
    for (const auto& row : reach) connected = connected && std::all_of(row.begin(), row.end(), [](bool b) { return b; });
    if (connected) return scene;
  }
  throw Error(ErrorKind::RetryExhausted, "randomize_scene",
              "no scene with mutually reachable landmarks within " + std::to_string(config.retry_budget) + " attempts");
}

}  // namespace scenepath
