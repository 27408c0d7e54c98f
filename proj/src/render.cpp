#include "scenepath/render.hpp"

#include <algorithm>
#include <cmath>

#include <fmt/format.h>

#include "scenepath/error.hpp"

namespace scenepath {

namespace {

std::string escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

std::string hex_color(double r, double g, double b) {
  auto byte = [](double x) { return static_cast<int>(std::lround(std::clamp(x, 0.0, 1.0) * 255.0)); };
  return fmt::format("#{:02x}{:02x}{:02x}", byte(r), byte(g), byte(b));
}

struct Frame {
  Box box;
  double scale;
  double margin;
  double width() const { return (box.hi.x - box.lo.x) * scale + 2 * margin; }
  double height() const { return (box.hi.y - box.lo.y) * scale + 2 * margin; }
  double px(double x) const { return margin + (x - box.lo.x) * scale; }
  double py(double y) const { return margin + (box.hi.y - y) * scale; }
  std::string pt(Vec2 p) const { return fmt::format("{:.2f},{:.2f}", px(p.x), py(p.y)); }
};

std::string polygon(const Frame& f, const Polygon& poly, const std::string& attrs) {
  std::string pts;
  for (std::size_t i = 0; i < poly.size(); ++i) pts += (i ? " " : "") + f.pt(poly[i]);
  return fmt::format("<polygon points=\"{}\" {}/>\n", pts, attrs);
}

}  // namespace

std::string speed_color(double v, const RenderSpec& spec) {
  if (!(spec.v_red > spec.v_blue)) throw Error(ErrorKind::Validation, "speed_color", "anchors must be ordered");
  const double f = std::clamp((v - spec.v_blue) / (spec.v_red - spec.v_blue), 0.0, 1.0);
  const double hue = 240.0 * (1.0 - f);
  const double h6 = hue / 60.0;
  const double x = 1.0 - std::abs(std::fmod(h6, 2.0) - 1.0);
  double r = 0, g = 0, b = 0;
  if (h6 < 1) {
    r = 1, g = x;
  } else if (h6 < 2) {
    r = x, g = 1;
  } else if (h6 < 3) {
    g = 1, b = x;
  } else {
    g = x, b = 1;
  }
  return hex_color(r, g, b);
}

PathLayer path_layer(const std::string& name, const GeometricPath& path, const SpeedProfile& profile) {
  PathLayer l;
  l.name = name;
  for (std::size_t i = 0; i < path.samples.size(); ++i) {
    l.points.push_back(path.samples[i].position);
    if (i < profile.v.size()) l.speeds.push_back(profile.v[i]);
  }
  if (l.speeds.size() != l.points.size()) l.speeds.clear();
  return l;
}

PathLayer trajectory_layer(const std::string& name, const Trajectory& trajectory) {
  PathLayer l;
  l.name = name;
  for (const Waypoint& w : trajectory.waypoints) {
    l.points.push_back(w.position);
    l.speeds.push_back(w.v);
  }
  return l;
}

PathLayer trace_layer(const std::string& name, const std::vector<TraceRow>& trace) {
  PathLayer l;
  l.name = name;
  for (const TraceRow& r : trace) {
    l.points.push_back(r.position);
    l.speeds.push_back(r.speed);
  }
  return l;
}

PathLayer reference_layer(const std::string& name, const GeometricPath& path) {
  PathLayer l;
  l.name = name;
  l.points = path.positions();
  l.dashed = true;
  return l;
}

std::string render_svg(const Scene& scene, const std::vector<PathLayer>& layers, const RenderSpec& spec) {
  if (!(spec.scale > 0.0)) throw Error(ErrorKind::Validation, "render_svg", "scale must be positive");
  const HeightMap& hm = scene.heightmap;
  const Frame f{hm.extent(), spec.scale, spec.margin};
  std::string out = fmt::format(
      "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{:.0f}\" height=\"{:.0f}\" viewBox=\"0 0 {:.2f} {:.2f}\">\n",
      std::ceil(f.width()), std::ceil(f.height()), f.width(), f.height());
  out += fmt::format("<rect x=\"0\" y=\"0\" width=\"{:.2f}\" height=\"{:.2f}\" fill=\"#ffffff\"/>\n", f.width(),
                     f.height());

  out += "<g id=\"heightmap\">\n";
  if (spec.heightmap && !hm.heights.empty()) {
    const auto [lo, hi] = std::minmax_element(hm.heights.begin(), hm.heights.end());
    const double range = *hi - *lo;
    for (int r = 0; r + 1 < hm.rows; ++r) {
      for (int c = 0; c + 1 < hm.cols; ++c) {
        const double h = 0.25 * (hm.at(r, c) + hm.at(r + 1, c) + hm.at(r, c + 1) + hm.at(r + 1, c + 1));
        const double shade = range > 0.0 ? (h - *lo) / range : 0.0;
        const Vec2 a = hm.node_position(r + 1, c);
        const double g = 0.96 - 0.4 * shade;
        out += fmt::format("<rect x=\"{:.2f}\" y=\"{:.2f}\" width=\"{:.2f}\" height=\"{:.2f}\" fill=\"{}\"/>\n",
                           f.px(a.x), f.py(a.y), hm.cell_size * spec.scale, hm.cell_size * spec.scale,
                           hex_color(g, g, g));
      }
    }
  }
  out += "</g>\n<g id=\"top-obstacles\">\n";
  for (const TopObstacle& t : scene.top_obstacles) {
    out += polygon(f, t.footprint, "fill=\"#c08040\" fill-opacity=\"0.35\" stroke=\"#805020\" stroke-width=\"1\"");
  }
  out += "</g>\n<g id=\"static-obstacles\">\n";
  for (const StaticObstacle& o : scene.static_obstacles) {
    out += polygon(f, o.footprint, "fill=\"#404040\" stroke=\"#202020\" stroke-width=\"1\"");
  }
  out += "</g>\n<g id=\"dynamic-obstacles\">\n";
  for (const DynamicObstacle& d : scene.dynamic_obstacles) {
    const Vec2 p = d.position(0.0);
    out += fmt::format(
        "<circle cx=\"{:.2f}\" cy=\"{:.2f}\" r=\"{:.2f}\" fill=\"none\" stroke=\"#a000a0\" stroke-width=\"1.5\"/>\n",
        f.px(p.x), f.py(p.y), d.radius * spec.scale);
  }
  out += "</g>\n<g id=\"landmarks\">\n";
  for (const Landmark& l : scene.landmarks) {
    Vec2 c{0, 0};
    for (Vec2 p : l.cells) c += p;
    c = c * (1.0 / static_cast<double>(std::max<std::size_t>(1, l.cells.size())));
    out += fmt::format("<circle cx=\"{:.2f}\" cy=\"{:.2f}\" r=\"4\" fill=\"#008000\"/>\n", f.px(c.x), f.py(c.y));
    out += fmt::format("<text x=\"{:.2f}\" y=\"{:.2f}\" font-size=\"12\" font-family=\"sans-serif\">{}</text>\n",
                       f.px(c.x) + 6, f.py(c.y) - 6, escape(l.name));
  }
  out += "</g>\n";

  for (const PathLayer& layer : layers) {
    out += fmt::format("<g class=\"path-layer\" id=\"{}\">\n", escape(layer.name));
    std::string pts;
    for (std::size_t i = 0; i < layer.points.size(); ++i) pts += (i ? " " : "") + f.pt(layer.points[i]);
    const bool colored = !layer.speeds.empty() && layer.speeds.size() == layer.points.size();
    std::string stroke = layer.color;
    if (colored) {
      double sum = 0.0;
      for (double v : layer.speeds) sum += v;
      stroke = speed_color(sum / static_cast<double>(layer.speeds.size()), spec);
    }
    out += fmt::format("<polyline points=\"{}\" fill=\"none\" stroke=\"{}\" stroke-width=\"{:.2f}\"{}/>\n", pts, stroke,
                       layer.dashed ? 1.5 : spec.stroke_width,
                       layer.dashed ? " stroke-dasharray=\"6,4\"" : "");
    if (colored) {
      for (std::size_t i = 0; i + 1 < layer.points.size(); ++i) {
        const double v = 0.5 * (layer.speeds[i] + layer.speeds[i + 1]);
        out += fmt::format("<line x1=\"{:.2f}\" y1=\"{:.2f}\" x2=\"{:.2f}\" y2=\"{:.2f}\" stroke=\"{}\" "
                           "stroke-width=\"{:.2f}\" stroke-linecap=\"round\"/>\n",
                           f.px(layer.points[i].x), f.py(layer.points[i].y), f.px(layer.points[i + 1].x),
                           f.py(layer.points[i + 1].y), speed_color(v, spec), spec.stroke_width);
      }
    }
    out += "</g>\n";
  }
  out += "</svg>\n";
  return out;
}

std::string pareto_svg(const std::vector<SlalomRow>& rows, bool disposition) {
  const double W = 520, H = 380, L = 60, R = 20, T = 30, B = 50;
  auto metric = [&](const SlalomRow& r) { return disposition ? r.mean_disposition : r.failure_rate; };
  double x_lo = 1e300, x_hi = -1e300, y_hi = 0.0;
  for (const SlalomRow& r : rows) {
    x_lo = std::min(x_lo, r.mean_time);
    x_hi = std::max(x_hi, r.mean_time);
    y_hi = std::max(y_hi, metric(r));
  }
  if (rows.empty()) x_lo = 0, x_hi = 1;
  if (x_hi - x_lo < 1e-9) x_hi = x_lo + 1.0;
  if (y_hi <= 0.0) y_hi = 1.0;
  const double pad = 0.05 * (x_hi - x_lo);
  x_lo -= pad;
  x_hi += pad;
  y_hi *= 1.1;
  auto px = [&](double x) { return L + (x - x_lo) / (x_hi - x_lo) * (W - L - R); };
  auto py = [&](double y) { return H - B - y / y_hi * (H - T - B); };

  std::string out = fmt::format(
      "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{:.0f}\" height=\"{:.0f}\" viewBox=\"0 0 {:.0f} {:.0f}\">\n", W,
      H, W, H);
  out += fmt::format("<rect x=\"0\" y=\"0\" width=\"{:.0f}\" height=\"{:.0f}\" fill=\"#ffffff\"/>\n", W, H);
  out += fmt::format("<line x1=\"{0}\" y1=\"{1}\" x2=\"{2}\" y2=\"{1}\" stroke=\"#000000\"/>\n", L, H - B, W - R);
  out += fmt::format("<line x1=\"{0}\" y1=\"{1}\" x2=\"{0}\" y2=\"{2}\" stroke=\"#000000\"/>\n", L, H - B, T);
  for (int i = 0; i <= 4; ++i) {
    const double x = x_lo + (x_hi - x_lo) * i / 4.0;
    const double y = y_hi * i / 4.0;
    out += fmt::format("<text x=\"{:.2f}\" y=\"{:.2f}\" font-size=\"10\" text-anchor=\"middle\">{:.1f}</text>\n", px(x),
                       H - B + 14, x);
    out += fmt::format("<text x=\"{:.2f}\" y=\"{:.2f}\" font-size=\"10\" text-anchor=\"end\">{:.3f}</text>\n", L - 4,
                       py(y) + 3, y);
  }
  out += fmt::format("<text x=\"{:.2f}\" y=\"{:.2f}\" font-size=\"12\" text-anchor=\"middle\">mean completion time (s)</text>\n",
                     (L + W - R) / 2, H - 12);
  out += fmt::format(
      "<text x=\"14\" y=\"{:.2f}\" font-size=\"12\" text-anchor=\"middle\" transform=\"rotate(-90 14 {:.2f})\">{}</text>\n",
      (T + H - B) / 2, (T + H - B) / 2, disposition ? "mean disposition error (m)" : "failure rate");
  for (const SlalomRow& r : rows) {
    const bool front = disposition ? r.pareto_disposition : r.pareto_failure;
    const std::string fill = r.kind == "qp" ? "#1f5fbf" : "#e07020";
    const std::string outline = front ? " stroke=\"#000000\" stroke-width=\"2\"" : "";
    if (r.kind == "qp") {
      out += fmt::format("<circle cx=\"{:.2f}\" cy=\"{:.2f}\" r=\"5\" fill=\"{}\"{}/>\n", px(r.mean_time), py(metric(r)),
                         fill, outline);
    } else {
      out += fmt::format("<rect x=\"{:.2f}\" y=\"{:.2f}\" width=\"9\" height=\"9\" fill=\"{}\"{}/>\n",
                         px(r.mean_time) - 4.5, py(metric(r)) - 4.5, fill, outline);
    }
    out += fmt::format("<text x=\"{:.2f}\" y=\"{:.2f}\" font-size=\"9\">{}</text>\n", px(r.mean_time) + 7,
                       py(metric(r)) - 6, escape(r.label));
  }
  out += "</svg>\n";
  return out;
}

}  // namespace scenepath
