#pragma once

#include <optional>
#include <vector>

#include "scenepath/instruct.hpp"
#include "scenepath/refiner.hpp"
#include "scenepath/route_graph.hpp"
#include "scenepath/speed_profile.hpp"

namespace scenepath {

struct PlannerConfig {
  GraphParams graph;
  RefinerParams refiner;
  EnvelopeParams envelope;
  CapOptions caps;
  ForecastParams forecast;
  double rate = 30.0;
  int max_top_retries = 5;
  bool stop_at_landmarks = false;  // v = 0 at every intermediate landmark
  bool stop_at_goal = true;        // v = 0 at the final landmark
  std::optional<double> constant_speed;  // baseline: ignore caps, hold this speed
};

/// Refiner and graph settings that must agree (slope limit, c_slope, radius).
PlannerConfig consistent(PlannerConfig config);

struct SegmentGeometry {
  CoarsePath coarse;
  GeometricPath path;
};

struct SegmentPlan {
  Instruction instruction;
  CoarsePath coarse;
  GeometricPath path;
  std::vector<double> caps;
  SpeedProfile profile;
  Trajectory trajectory;
  bool stop = true;          // v = 0 at the end
  double end_bound = 0.0;    // cap on the end speed when not stopping
};

struct RoutePlan {
  std::vector<SegmentPlan> segments;
  double completion_time = 0.0;
};

/// Node of the landmark nearest its centroid that has live edges.
int landmark_anchor(const GridGraph& graph, const Landmark& landmark);

/// A*, smoothing and head height. Impassable ceilings found after smoothing
/// are blocked in a private copy of the graph and A* reruns.
SegmentGeometry plan_geometry(const Scene& scene, const GridGraph& graph, int start_node, const Landmark& goal,
                              const LocomotionType& locomotion, const PlannerConfig& config,
                              const std::vector<DiskConstraint>& disks = {});

/// Speed caps for a refined path under the config.
std::vector<double> segment_caps(const GeometricPath& path, const PlannerConfig& config);

/// Minimum-time profile from v_start (clamped to what the caps allow). The end
/// is either held at zero or left free below `end_bound`.
SpeedProfile plan_speed(const GeometricPath& path, const std::vector<double>& caps, double v_start, bool stop,
                        double end_bound, const PlannerConfig& config);

/// Largest speed the segment can be entered with given how it must end.
double entry_speed_bound(const GeometricPath& path, const std::vector<double>& caps, bool stop, double end_bound,
                         const PlannerConfig& config);

/// Plans every instruction of the route, chaining speeds across landmarks.
/// Errors carry the segment index in `where`.
RoutePlan plan_route(const Scene& scene, const GridGraph& graph, const RouteRequest& request,
                     const PlannerConfig& config);

}  // namespace scenepath
