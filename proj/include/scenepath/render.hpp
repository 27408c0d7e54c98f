#pragma once

#include <string>
#include <vector>

#include "scenepath/bench.hpp"

namespace scenepath {

struct RenderSpec {
  double scale = 20.0;   // pixels per meter
  double margin = 20.0;  // pixels around the scene extent
  double v_blue = 1.0;   // speeds at or below are blue
  double v_red = 3.5;    // speeds at or above are red
  bool heightmap = true;
  double stroke_width = 3.0;
};

/// A polyline drawn over the scene. With per-point speeds the segments are
/// colored by speed; otherwise `color` is used.
struct PathLayer {
  std::string name;
  std::vector<Vec2> points;
  std::vector<double> speeds;
  bool dashed = false;
  std::string color = "#000000";
};

/// "#rrggbb" with hue 240 (blue) at v_blue falling linearly to 0 (red) at v_red.
std::string speed_color(double v, const RenderSpec& spec = {});

PathLayer path_layer(const std::string& name, const GeometricPath& path, const SpeedProfile& profile);
PathLayer trajectory_layer(const std::string& name, const Trajectory& trajectory);
PathLayer trace_layer(const std::string& name, const std::vector<TraceRow>& trace);
PathLayer reference_layer(const std::string& name, const GeometricPath& path);

/// Scene with heightmap shading, obstacles, landmarks and one polyline per layer.
std::string render_svg(const Scene& scene, const std::vector<PathLayer>& layers, const RenderSpec& spec = {});

/// Scatter of mean completion time against failure rate or disposition error,
/// undominated rows outlined.
std::string pareto_svg(const std::vector<SlalomRow>& rows, bool disposition);

}  // namespace scenepath
