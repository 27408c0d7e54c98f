#pragma once

#include <array>
#include <cstdint>
#include <limits>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

#include "scenepath/planner.hpp"
#include "scenepath/rng.hpp"

namespace scenepath {

struct AgentState {
  Vec2 position;
  double heading = 0.0;
  double speed = 0.0;
  double head_z = 1.47;
  double t = 0.0;
};

struct TrackerParams {
  int lookahead = 3;  // waypoints ahead of the time-indexed one
  double turn_rate_max = std::numbers::pi;
  double lateral_accel_max = 3.0;  // turning is also limited to this / speed
  double lag_gain = 1.0;  // extra speed per meter of along-track lag
  double catchup_margin = 0.2;  // how far lag correction may exceed the planned speed at the agent's position
  double max_height_rate = 0.5;
  double body_radius = 0.3;  // contact radius for collision events
  // Lateral noise sigma (m/sqrt(s)) for flat, slope, rough and stairs terrain.
  std::array<double, 4> sigma{0.0, 0.01, 0.03, 0.05};
  double sigma_scale = 1.0;
  EnvelopeParams envelope;
};

/// What the tracker is steering toward this step.
struct TrackingTarget {
  Vec2 pursuit;          // lookahead point
  Vec2 reference;        // time-indexed waypoint
  Vec2 tangent;          // unit direction of travel at the reference
  double speed = 0.0;    // waypoint-implied speed
  double head_z = 1.47;  // head height wanted at the agent's location
  double speed_limit = std::numeric_limits<double>::infinity();  // planned speed at the agent's location
};

/// Target for time t (relative to the trajectory start). `head_z` comes from
/// the path at the agent's projected arc length when a path is given.
TrackingTarget tracking_target(const Trajectory& traj, double t, const AgentState& state, const TrackerParams& params,
                               const GeometricPath* path = nullptr, double* s_hint = nullptr);

/// One control tick: pure pursuit with turn-rate and acceleration slew
/// limits, the height envelope as a hard speed cap, then lateral noise.
AgentState step(const AgentState& state, const TrackingTarget& target, const Scene& scene,
                const TrackerParams& params, double dt, Rng& rng, bool brake = false);

enum class CollisionKind { Static, Dynamic, Ceiling };
const char* to_string(CollisionKind k);

struct CollisionEvent {
  double t = 0.0;
  CollisionKind kind = CollisionKind::Static;
  std::string what;
  Vec2 position;
};

struct SegmentReport {
  std::string target;
  bool reached = false;
  double arrival_time = 0.0;
  int replans = 0;
};

struct TraceRow {
  double t;
  int segment;
  Vec2 position;
  double head_z;     // above ground
  double z;          // absolute head elevation
  double speed;
  Vec2 ref_position;
  double ref_z;
};

struct RunReport {
  bool success = false;
  std::string failure;  // "", "collision", "timeout", "unavoidable", "missed-landmark"
  double completion_time = 0.0;
  double planned_time = 0.0;
  double xy_err = 0.0;
  double z_err = 0.0;
  double disposition_err = 0.0;
  double adherence_score = 0.0;
  std::vector<CollisionEvent> collision_events;
  int replan_count = 0;
  double max_envelope_excess = 0.0;  // max over steps of speed - envelope_vmax(head_z)
  double max_crawl_speed = 0.0;      // max speed while head_z is at crawl height
  std::vector<SegmentReport> segments;
  std::vector<TraceRow> trace;
};

struct SimConfig {
  PlannerConfig planner;
  TrackerParams tracker;
  double dt = 1.0 / 30.0;
  double goal_tolerance = 0.5;
  double timeout_factor = 3.0;
  double unavoidable_limit = 3.0;
  int max_replan_rounds = 4;
  bool replanning = true;
  bool record_trace = false;
};

/// Replacement for `current` from the agent's state that avoids the forecast
/// contacts. Forecasts on each candidate add keep-out regions for up to
/// max_replan_rounds; nullopt when none is clean.
std::optional<SegmentPlan> replan_segment(const Scene& scene, const GridGraph& graph, const SegmentPlan& current,
                                          std::vector<CollisionForecast> forecasts, const AgentState& state,
                                          const SimConfig& config);

/// Plans and simulates the route closed-loop. Throws planning errors with the
/// segment index; everything that happens during the run is reported.
RunReport run_route(const Scene& scene, const RouteRequest& request, const SimConfig& config, std::uint64_t seed,
                    const GridGraph* graph = nullptr);

/// As run_route, starting from an existing plan.
RunReport run_plan(const Scene& scene, const GridGraph& graph, const RoutePlan& plan, const SimConfig& config,
                   std::uint64_t seed);

}  // namespace scenepath
