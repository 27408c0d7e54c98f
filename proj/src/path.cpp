#include "scenepath/path.hpp"

#include <algorithm>
#include <cmath>

namespace scenepath {

std::vector<Vec2> GeometricPath::positions() const {
  std::vector<Vec2> out;
  out.reserve(samples.size());
  for (const PathSample& p : samples) out.push_back(p.position);
  return out;
}

namespace {

// Index i with samples[i].s <= s < samples[i+1].s, and the fraction in that segment.
std::pair<std::size_t, double> locate(const std::vector<PathSample>& samples, double s) {
  if (samples.size() < 2 || s <= samples.front().s) return {0, 0.0};
  if (s >= samples.back().s) return {samples.size() - 2, 1.0};
  const auto it = std::upper_bound(samples.begin(), samples.end(), s,
                                   [](double v, const PathSample& p) { return v < p.s; });
  const std::size_t i = static_cast<std::size_t>(it - samples.begin()) - 1;
  const double ds = samples[i + 1].s - samples[i].s;
  return {i, ds > 0.0 ? (s - samples[i].s) / ds : 0.0};
}

}  // namespace

Vec2 GeometricPath::position_at(double s) const {
  if (samples.size() == 1) return samples.front().position;
  const auto [i, f] = locate(samples, s);
  return samples[i].position + (samples[i + 1].position - samples[i].position) * f;
}

double GeometricPath::head_z_at(double s) const {
  if (samples.size() == 1) return samples.front().head_z;
  const auto [i, f] = locate(samples, s);
  return samples[i].head_z + (samples[i + 1].head_z - samples[i].head_z) * f;
}

double GeometricPath::ground_z_at(double s) const {
  if (samples.size() == 1) return samples.front().ground_z;
  const auto [i, f] = locate(samples, s);
  return samples[i].ground_z + (samples[i + 1].ground_z - samples[i].ground_z) * f;
}

double polyline_length(const std::vector<Vec2>& pts) {
  double len = 0.0;
  for (std::size_t i = 1; i < pts.size(); ++i) len += distance(pts[i - 1], pts[i]);
  return len;
}

double total_turning(const std::vector<Vec2>& pts) {
  double sum = 0.0;
  for (std::size_t i = 1; i + 1 < pts.size(); ++i) sum += std::abs(turning_angle(pts[i - 1], pts[i], pts[i + 1]));
  return sum;
}

std::vector<Vec2> resample_polyline(const std::vector<Vec2>& pts, double spacing) {
  std::vector<Vec2> out;
  if (pts.empty()) return out;
  out.push_back(pts.front());
  const double total = polyline_length(pts);
  if (total <= 0.0) return out;
  const auto steps = static_cast<std::size_t>(std::floor(total / spacing + 1e-9));
  std::size_t seg = 0;
  double seg_start = 0.0;
  for (std::size_t k = 1; k <= steps; ++k) {
    const double target = static_cast<double>(k) * spacing;
    if (target > total - 1e-9) break;
    while (seg + 1 < pts.size() - 1 && seg_start + distance(pts[seg], pts[seg + 1]) < target) {
      seg_start += distance(pts[seg], pts[seg + 1]);
      ++seg;
    }
    const double len = distance(pts[seg], pts[seg + 1]);
    const double f = len > 0.0 ? std::clamp((target - seg_start) / len, 0.0, 1.0) : 0.0;
    out.push_back(pts[seg] + (pts[seg + 1] - pts[seg]) * f);
  }
  // A sliver final segment would produce a spurious curvature spike.
  const double tail = total - static_cast<double>(out.size() - 1) * spacing;
  if (out.size() > 1 && tail < 0.2 * spacing) out.pop_back();
  out.push_back(pts.back());
  return out;
}

void compute_curvature(GeometricPath& path) {
  auto& s = path.samples;
  if (s.size() < 3) {
    for (auto& p : s) p.curvature = 0.0;
    return;
  }
  for (std::size_t i = 1; i + 1 < s.size(); ++i) {
    s[i].curvature = menger_curvature(s[i - 1].position, s[i].position, s[i + 1].position);
  }
  s.front().curvature = s[1].curvature;
  s.back().curvature = s[s.size() - 2].curvature;
}

}  // namespace scenepath
