#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "scenepath/path.hpp"

namespace scenepath {

/// Height-coupled motion limits of the character.
struct EnvelopeParams {
  double z_min = 0.4;
  double z_full = 1.2;  // height from which the full speed is available
  double v_max = 5.0;
  double a_max = 0.5;
  double a_min = -0.1;
  double a_lat_max = 2.0;
  double k_slope_up = 1.0;
  double k_slope_down = 0.5;
};

inline constexpr double kMinHeadHeight = 0.4;
inline constexpr double kMaxHeadHeight = 1.47;

/// Linear from 1 m/s at z_min to v_max at z_full, then flat, for z in
/// [0.4, 1.47]. Written as a blend of the two anchors so both are exact.
double envelope_vmax(double z, const EnvelopeParams& params = {});

struct CapOptions {
  bool apply_envelope = true;
};

/// Per-sample speed cap from the locomotion range, the height envelope,
/// lateral acceleration on curvature, and uphill/downhill derating.
std::vector<double> point_speed_caps(const GeometricPath& path, const EnvelopeParams& params,
                                     const LocomotionType& locomotion, CapOptions options = {});

struct SolverDiagnostics {
  int iterations = 0;
  double max_violation = 0.0;
  bool polished = false;
};

/// Speeds along a path. `beta` holds v^2, `t` the arrival time at each sample.
struct SpeedProfile {
  std::vector<double> s;
  std::vector<double> v;
  std::vector<double> beta;
  std::vector<double> t;
  double completion_time = 0.0;
  std::vector<std::size_t> stalled_segments;  // segments with v = 0 at both ends
  SolverDiagnostics diagnostics;
};

/// Problem data shared by the QP solver and the two-pass oracle.
struct SpeedProblem {
  std::vector<double> s;     // sample arc lengths, strictly increasing
  std::vector<double> caps;  // per-sample speed cap, may be +inf
  double a_max = 0.5;
  double a_min = -0.1;
  double v_start = 0.0;
  std::optional<double> v_end;  // nullopt: free, limited only by the caps

  static SpeedProblem from_path(const GeometricPath& path, std::vector<double> caps, const EnvelopeParams& params,
                                double v_start, std::optional<double> v_end);
};

/// Minimum-time profile: maximise beta = v^2 pointwise via the convex
/// surrogate sum (cap^2 - beta)^2 subject to caps, boundary speeds and
/// (beta_{i+1} - beta_i) / (2 ds) in [a_min, a_max]. Solved with a
/// primal-dual interior point method on the tridiagonal KKT system, then
/// polished on the identified active set.
SpeedProfile solve_min_time_qp(const SpeedProblem& problem);

/// Classical forward/backward pass; the pointwise-maximal feasible profile.
SpeedProfile forward_backward_oracle(const SpeedProblem& problem);

/// Fills v, t, completion_time and stalled segments from s and beta.
void finalize_profile(SpeedProfile& profile);

/// Largest v_start for which the problem stays feasible (caps included).
double max_feasible_start_speed(const SpeedProblem& problem);

/// Profile holding `speed` everywhere (constant-speed baseline).
SpeedProfile constant_speed_profile(const GeometricPath& path, double speed);

/// Maximum violation of caps, boundaries and acceleration bounds.
double profile_violation(const SpeedProblem& problem, const SpeedProfile& profile);

struct Waypoint {
  double t = 0.0;
  double s = 0.0;
  Vec2 position;
  double z = 0.0;       // absolute head elevation
  double head_z = 0.0;  // head height above ground
  double v = 0.0;
};

struct Trajectory {
  std::vector<Waypoint> waypoints;
  double rate = 30.0;

  double duration() const { return waypoints.empty() ? 0.0 : waypoints.back().t; }
  /// Linear interpolation in time, clamped to the ends.
  Waypoint sample(double t) const;
};

/// Arc length reached at time t under the constant-acceleration model of a profile.
double arc_length_at(const SpeedProfile& profile, double t);

/// Fixed-rate waypoints: ceil(T * rate) + 1 of them, the last on the path end.
Trajectory to_trajectory(const GeometricPath& path, const SpeedProfile& profile, double rate = 30.0);

struct TrainingPathParams {
  double length = 40.0;
  double spacing = 0.25;
  double max_height_rate = 0.5;
  double knot_spacing = 4.0;
  double max_turn_rate = 0.3;  // rad per meter
  EnvelopeParams envelope;
};

struct TrainingSample {
  GeometricPath path;
  SpeedProfile profile;
};

/// Random training path: heights in [0.4, 1.47] with bounded height rate,
/// speeds uniform in [0, envelope_vmax(z)].
TrainingSample sample_training_path(std::uint64_t seed, const TrainingPathParams& params = {});

}  // namespace scenepath
