#pragma once

#include <cstdint>
#include <istream>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "scenepath/geometry.hpp"

namespace scenepath {

/// Regular grid of terrain elevations. Sample (r, c) sits at
/// origin + (c, r) * cell_size; heights are row-major.
struct HeightMap {
  Vec2 origin;
  double cell_size = 0.25;
  int rows = 0;
  int cols = 0;
  std::vector<double> heights;

  double at(int r, int c) const { return heights[static_cast<std::size_t>(r) * cols + c]; }
  double& at(int r, int c) { return heights[static_cast<std::size_t>(r) * cols + c]; }
  Vec2 node_position(int r, int c) const { return {origin.x + c * cell_size, origin.y + r * cell_size}; }
  Box extent() const {
    return {origin, {origin.x + (cols - 1) * cell_size, origin.y + (rows - 1) * cell_size}};
  }
  bool contains(Vec2 p) const { return extent().contains(p, 1e-9); }

  static HeightMap flat(Vec2 origin, double cell_size, int rows, int cols, double h = 0.0) {
    return {origin, cell_size, rows, cols, std::vector<double>(static_cast<std::size_t>(rows) * cols, h)};
  }

  bool operator==(const HeightMap&) const = default;
};

struct StaticObstacle {
  Polygon footprint;
  bool operator==(const StaticObstacle&) const = default;
};

struct TopObstacle {
  Polygon footprint;
  double clearance_height = 0.0;
  bool operator==(const TopObstacle&) const = default;
};

struct LinearMotion {
  Vec2 start;
  Vec2 velocity;
  bool operator==(const LinearMotion&) const = default;
};

/// Closed loop through `points` at constant speed, returning to the first point.
struct WaypointLoopMotion {
  std::vector<Vec2> points;
  double speed = 0.0;
  bool operator==(const WaypointLoopMotion&) const = default;
};

/// Constant-velocity motion reflected at the faces of an axis-aligned box.
struct BounceMotion {
  Vec2 start;
  Vec2 velocity;
  Vec2 bounds_min;
  Vec2 bounds_max;
  bool operator==(const BounceMotion&) const = default;
};

using MotionRule = std::variant<LinearMotion, WaypointLoopMotion, BounceMotion>;

Vec2 position_at(const MotionRule& rule, double t);
Vec2 velocity_at(const MotionRule& rule, double t);

struct DynamicObstacle {
  std::string id;
  double radius = 0.0;
  MotionRule rule;

  Vec2 position(double t) const { return position_at(rule, t); }
  Vec2 velocity(double t) const { return velocity_at(rule, t); }
  bool operator==(const DynamicObstacle&) const = default;
};

struct Landmark {
  std::string name;
  std::vector<Vec2> cells;
  bool operator==(const Landmark&) const = default;
};

/// Terrain, static walls, overhead obstacles, moving obstacles and named
/// landmarks. Immutable once validated.
struct Scene {
  HeightMap heightmap;
  std::vector<StaticObstacle> static_obstacles;
  std::vector<TopObstacle> top_obstacles;
  std::vector<DynamicObstacle> dynamic_obstacles;
  std::vector<Landmark> landmarks;

  bool operator==(const Scene&) const = default;

  /// Bilinear interpolation of the four surrounding samples.
  double terrain_height(Vec2 p) const;
  /// Vertical free space above ground at p; +inf when no top obstacle covers p.
  double clearance_at(Vec2 p) const;
  Vec2 obstacle_position(std::string_view id, double t) const;

  /// Distance from p to the nearest static obstacle (+inf when there are none).
  double static_clearance(Vec2 p) const;

  const Landmark& landmark(std::string_view name) const;
  const Landmark* find_landmark(std::string_view name) const;
  const DynamicObstacle& dynamic_obstacle(std::string_view id) const;
};

/// Throws Error(Validation) naming the first violated invariant.
void validate(const Scene& scene);

Scene load_scene(std::string_view document);
Scene load_scene(std::istream& in);
Scene load_scene_file(const std::string& path);

std::string save_scene(const Scene& scene);
void save_scene_file(const Scene& scene, const std::string& path);

struct RandomSceneConfig {
  double size_x = 30.0;
  double size_y = 30.0;
  double cell_size = 0.25;
  int slope_patches = 2;
  int rough_patches = 2;
  int stairs_patches = 2;
  double patch_min = 3.0;
  double patch_max = 7.0;
  double slope_grade = 0.3;
  double slope_plateau = 0.9;
  double rough_amplitude = 0.06;
  double stair_height = 0.17;
  double stair_depth = 0.30;
  int stair_steps = 4;
  int walls = 6;
  double wall_min = 2.0;
  double wall_max = 6.0;
  double wall_thickness = 0.3;
  int top_obstacles = 3;
  double top_min = 2.0;
  double top_max = 4.0;
  std::vector<double> top_clearances{0.6, 0.9, 1.2};
  int landmarks = 4;
  double landmark_separation = 8.0;
  int retry_budget = 50;
};

/// Deterministic under (seed, config). Landmarks are pairwise reachable on
/// the pruned grid graph built with default parameters.
Scene randomize_scene(std::uint64_t seed, const RandomSceneConfig& config = {});

enum class TerrainClass { Flat, Slope, Rough, Stairs };
const char* to_string(TerrainClass c);

/// Local terrain class at p from the heightmap samples around the nearest node.
TerrainClass classify_terrain(const Scene& scene, Vec2 p);

}  // namespace scenepath
