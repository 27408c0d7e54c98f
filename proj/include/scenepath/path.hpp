#pragma once

#include <vector>

#include "scenepath/geometry.hpp"
#include "scenepath/instruct.hpp"

namespace scenepath {

struct PathSample {
  Vec2 position;
  double ground_z = 0.0;
  double head_z = 1.47;  // above ground
  double s = 0.0;
  double curvature = 0.0;
};

/// Arc-length resampled path with per-sample head height.
struct GeometricPath {
  std::vector<PathSample> samples;
  double spacing = 0.25;
  LocomotionType locomotion;
  bool degraded = false;

  std::size_t size() const { return samples.size(); }
  double length() const { return samples.empty() ? 0.0 : samples.back().s; }
  std::vector<Vec2> positions() const;
  /// Linear interpolation of position at arc length s (clamped).
  Vec2 position_at(double s) const;
  double head_z_at(double s) const;
  double ground_z_at(double s) const;
};

/// Samples at s = 0, spacing, 2*spacing, ... along the polyline, plus the
/// polyline's final point.
std::vector<Vec2> resample_polyline(const std::vector<Vec2>& pts, double spacing);

double polyline_length(const std::vector<Vec2>& pts);
/// Sum of |turning angle| over interior vertices.
double total_turning(const std::vector<Vec2>& pts);

/// Menger curvature per sample; endpoints copy their neighbour.
void compute_curvature(GeometricPath& path);

}  // namespace scenepath
