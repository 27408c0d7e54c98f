#pragma once

#include <optional>
#include <string>
#include <vector>

#include "scenepath/path.hpp"
#include "scenepath/route_graph.hpp"
#include "scenepath/speed_profile.hpp"

namespace scenepath {

struct RefinerParams {
  double spacing = 0.25;
  double clearance_margin = 0.4;  // min distance from static footprints
  double push_buffer = 0.15;      // extra room made at corners before cutting
  bool smoothing = true;
  int cut_iterations = 3;
  double head_margin = 0.1;
  double lead_distance = 1.5;
  double dip_hold = 0.5;  // arc length on each side of a low sample kept at its height
  double max_height_rate = 0.5;  // m of head height per m of path
  double min_top_clearance = 0.5;
  double slope_limit = 1.0;
  double c_slope = 0.0;
};

/// Region the refined path must avoid: the set of points within `radius` of
/// the segment a-b (a disk when a == b).
struct DiskConstraint {
  Vec2 a;
  Vec2 b;
  double radius = 0.0;

  double distance_to(Vec2 p) const { return distance_point_segment(p, a, b); }
};

/// Simplifies, string-pulls, cuts corners and resamples the coarse polyline.
/// Falls back to the plain resampled polyline (flagged degraded) when the
/// corridor is at most twice the margin wide or smoothing breaks an invariant.
GeometricPath smooth_and_resample(const std::vector<Vec2>& coarse, const Scene& scene, const RefinerParams& params,
                                  const LocomotionType& locomotion, const std::vector<DiskConstraint>& disks = {});

/// Narrowest free width across the polyline, from perpendicular ray casts
/// against static footprints at every vertex and segment midpoint.
double corridor_width(const std::vector<Vec2>& pts, const Scene& scene, double max_range = 10.0);

/// First sample where clearance - head_margin is below the crawl height.
std::optional<Vec2> find_impassable(const GeometricPath& path, const Scene& scene, const RefinerParams& params);

/// Lowers head_z under top obstacles with ramps of slope <= max_height_rate
/// that begin up to lead_distance ahead. Throws ImpassableTop.
void assign_head_height(GeometricPath& path, const Scene& scene, const RefinerParams& params);

enum class PredictionMode { Exact, ConstantVelocity };

struct ForecastParams {
  double horizon = 1.5;
  double dt = 1.0 / 30.0;
  double agent_radius = 0.4;
  double safety_margin = 0.1;
  PredictionMode mode = PredictionMode::Exact;
  double sweep_time = 3.0;  // how far past the contact time the replan keeps out
};

struct CollisionForecast {
  std::string obstacle_id;
  double time_to_collision = 0.0;
  Vec2 obstacle_position;
  Vec2 obstacle_velocity;
  double s = 0.0;
};

/// Obstacle position predicted at time t from what is observable at t_now.
Vec2 predict_obstacle(const DynamicObstacle& obs, double t_now, double t, PredictionMode mode);

/// Agent follows `profile` along `path`, with profile time 0 at scene time
/// `path_t0`. Reports, per obstacle, the first contact in [t_now, t_now + horizon].
std::vector<CollisionForecast> forecast_collisions(const GeometricPath& path, const SpeedProfile& profile,
                                                   const Scene& scene, double path_t0, double t_now,
                                                   const ForecastParams& params = {});

/// Keep-out capsule for a forecast: the obstacle's predicted sweep from now
/// until sweep_time past the contact, widened by both radii and the margin.
DiskConstraint forecast_constraint(const CollisionForecast& f, const DynamicObstacle& obs, double t_now,
                                   const ForecastParams& params);

struct ReplanResult {
  CoarsePath path;
  bool unavoidable = false;
};

/// A* on a copy of the graph with edges crossing any constraint removed.
/// When the goal becomes unreachable the previous path is kept and flagged.
ReplanResult replan_with_forecast(const GridGraph& graph, Vec2 start, const Landmark& goal,
                                  const std::vector<DiskConstraint>& constraints, const CoarsePath& previous);

/// Copy of the graph with every edge within a constraint region marked Blocked.
GridGraph block_constraints(const GridGraph& graph, const std::vector<DiskConstraint>& constraints);

}  // namespace scenepath
