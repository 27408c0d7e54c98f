#include "scenepath/io.hpp"

#include <cmath>
#include <cstdlib>
#include <limits>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <fmt/format.h>

#include "json.hpp"
#include "scenepath/error.hpp"

namespace scenepath {

namespace {

using ordered_json = nlohmann::ordered_json;

// Shortest round-trip text; infinities become "inf" in CSV.
std::string num(double v) {
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  return fmt::format("{}", v);
}

ordered_json jnum(double v) {
  if (!std::isfinite(v)) return nullptr;
  return v;
}

ordered_json point(Vec2 p) { return ordered_json::array({p.x, p.y}); }

ordered_json report_body(const RunReport& r) {
  ordered_json j;
  j["success"] = r.success;
  j["failure"] = r.failure;
  j["completion_time"] = jnum(r.completion_time);
  j["planned_time"] = jnum(r.planned_time);
  j["xy_err"] = jnum(r.xy_err);
  j["z_err"] = jnum(r.z_err);
  j["disposition_err"] = jnum(r.disposition_err);
  j["adherence_score"] = jnum(r.adherence_score);
  j["replan_count"] = r.replan_count;
  j["max_envelope_excess"] = jnum(r.max_envelope_excess);
  j["max_crawl_speed"] = jnum(r.max_crawl_speed);
  ordered_json events = ordered_json::array();
  for (const CollisionEvent& e : r.collision_events) {
    events.push_back({{"t", e.t}, {"kind", to_string(e.kind)}, {"what", e.what}, {"position", point(e.position)}});
  }
  j["collision_events"] = std::move(events);
  ordered_json segs = ordered_json::array();
  for (const SegmentReport& s : r.segments) {
    segs.push_back({{"target", s.target},
                    {"reached", s.reached},
                    {"arrival_time", jnum(s.arrival_time)},
                    {"replans", s.replans}});
  }
  j["segments"] = std::move(segs);
  return j;
}

ordered_json slalom_row_json(const SlalomRow& r) {
  return {{"label", r.label},
          {"kind", r.kind},
          {"a_lat_max", r.a_lat_max},
          {"a_max", r.a_max},
          {"speed", r.speed},
          {"planned_time", r.planned_time},
          {"mean_time", r.mean_time},
          {"failure_rate", r.failure_rate},
          {"mean_disposition", r.mean_disposition},
          {"mean_xy", r.mean_xy},
          {"mean_z", r.mean_z},
          {"pareto_failure", r.pareto_failure},
          {"pareto_disposition", r.pareto_disposition}};
}

std::string dump(const ordered_json& j) { return j.dump(2) + "\n"; }

}  // namespace

std::string path_csv(const GeometricPath& path) {
  std::string out = "s,x,y,ground_z,head_z,curvature\n";
  for (const PathSample& p : path.samples) {
    out += fmt::format("{},{},{},{},{},{}\n", num(p.s), num(p.position.x), num(p.position.y), num(p.ground_z),
                       num(p.head_z), num(p.curvature));
  }
  return out;
}

std::string profile_csv(const SpeedProfile& profile, const std::vector<double>& caps) {
  std::string out = "s,v_cap,v,beta,t\n";
  for (std::size_t i = 0; i < profile.s.size(); ++i) {
    const double cap = i < caps.size() ? caps[i] : std::numeric_limits<double>::infinity();
    out += fmt::format("{},{},{},{},{}\n", num(profile.s[i]), num(cap), num(profile.v[i]), num(profile.beta[i]),
                       num(profile.t[i]));
  }
  return out;
}

std::string trajectory_csv(const Trajectory& trajectory) {
  std::string out = "t,x,y,z,v\n";
  for (const Waypoint& w : trajectory.waypoints) {
    out += fmt::format("{},{},{},{},{}\n", num(w.t), num(w.position.x), num(w.position.y), num(w.z), num(w.v));
  }
  return out;
}

std::string trace_csv(const std::vector<TraceRow>& trace) {
  std::string out = "t,segment,x,y,head_z,z,speed,ref_x,ref_y,ref_z\n";
  for (const TraceRow& r : trace) {
    out += fmt::format("{},{},{},{},{},{},{},{},{},{}\n", num(r.t), r.segment, num(r.position.x), num(r.position.y),
                       num(r.head_z), num(r.z), num(r.speed), num(r.ref_position.x), num(r.ref_position.y),
                       num(r.ref_z));
  }
  return out;
}

std::string route_path_csv(const RoutePlan& plan) {
  std::string out = "segment,s,x,y,ground_z,head_z,curvature\n";
  double s0 = 0.0;
  for (std::size_t k = 0; k < plan.segments.size(); ++k) {
    const GeometricPath& path = plan.segments[k].path;
    for (const PathSample& p : path.samples) {
      out += fmt::format("{},{},{},{},{},{},{}\n", k, num(s0 + p.s), num(p.position.x), num(p.position.y),
                         num(p.ground_z), num(p.head_z), num(p.curvature));
    }
    s0 += path.length();
  }
  return out;
}

std::string route_profile_csv(const RoutePlan& plan) {
  std::string out = "segment,s,v_cap,v,beta,t\n";
  double s0 = 0.0, t0 = 0.0;
  for (std::size_t k = 0; k < plan.segments.size(); ++k) {
    const SegmentPlan& seg = plan.segments[k];
    const SpeedProfile& p = seg.profile;
    for (std::size_t i = 0; i < p.s.size(); ++i) {
      const double cap = i < seg.caps.size() ? seg.caps[i] : std::numeric_limits<double>::infinity();
      out += fmt::format("{},{},{},{},{},{}\n", k, num(s0 + p.s[i]), num(cap), num(p.v[i]), num(p.beta[i]),
                         num(t0 + p.t[i]));
    }
    s0 += seg.path.length();
    t0 += p.completion_time;
  }
  return out;
}

std::string route_trajectory_csv(const RoutePlan& plan) {
  std::string out = "segment,t,x,y,z,head_z,v\n";
  double t0 = 0.0;
  for (std::size_t k = 0; k < plan.segments.size(); ++k) {
    const Trajectory& traj = plan.segments[k].trajectory;
    for (const Waypoint& w : traj.waypoints) {
      out += fmt::format("{},{},{},{},{},{},{}\n", k, num(t0 + w.t), num(w.position.x), num(w.position.y), num(w.z),
                         num(w.head_z), num(w.v));
    }
    t0 += traj.duration();
  }
  return out;
}

std::string csv_to_json(const std::string& csv) {
  std::istringstream in(csv);
  std::string line;
  auto split = [](const std::string& l) {
    std::vector<std::string> cells;
    std::string cell;
    std::istringstream ls(l);
    while (std::getline(ls, cell, ',')) cells.push_back(cell);
    if (!l.empty() && l.back() == ',') cells.emplace_back();
    return cells;
  };
  ordered_json rows = ordered_json::array();
  if (!std::getline(in, line)) return dump(rows);
  const std::vector<std::string> header = split(line);
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const std::vector<std::string> cells = split(line);
    ordered_json row = ordered_json::object();
    for (std::size_t i = 0; i < header.size(); ++i) {
      const std::string cell = i < cells.size() ? cells[i] : "";
      if (cell == "inf" || cell == "-inf" || cell == "nan") {
        row[header[i]] = nullptr;
        continue;
      }
      char* end = nullptr;
      const double v = std::strtod(cell.c_str(), &end);
      if (!cell.empty() && end == cell.c_str() + cell.size()) {
        const bool integral = cell.find_first_of(".eE") == std::string::npos;
        if (integral) {
          row[header[i]] = std::stoll(cell);
        } else {
          row[header[i]] = v;
        }
      } else {
        row[header[i]] = cell;
      }
    }
    rows.push_back(std::move(row));
  }
  return dump(rows);
}

std::string plan_summary_json(const RoutePlan& plan) {
  ordered_json j;
  j["schema_version"] = kSchemaVersion;
  j["completion_time"] = plan.completion_time;
  ordered_json segs = ordered_json::array();
  for (std::size_t k = 0; k < plan.segments.size(); ++k) {
    const SegmentPlan& s = plan.segments[k];
    segs.push_back({{"index", k},
                    {"instruction", render_instruction(s.instruction)},
                    {"target", s.instruction.target},
                    {"gait", to_string(s.instruction.locomotion.gait)},
                    {"coarse_nodes", s.coarse.nodes.size()},
                    {"coarse_cost", s.coarse.cost},
                    {"path_length", s.path.length()},
                    {"samples", s.path.size()},
                    {"degraded", s.path.degraded},
                    {"completion_time", s.profile.completion_time},
                    {"end_speed", s.profile.v.empty() ? 0.0 : s.profile.v.back()},
                    {"stop", s.stop}});
  }
  j["segments"] = std::move(segs);
  return dump(j);
}

std::string run_report_json(const RunReport& report, std::uint64_t seed) {
  ordered_json j;
  j["schema_version"] = kSchemaVersion;
  j["seed"] = seed;
  const ordered_json body = report_body(report);
  for (const auto& [k, v] : body.items()) j[k] = v;
  return dump(j);
}

std::string slalom_csv(const std::vector<SlalomRow>& rows) {
  std::string out =
      "label,kind,a_lat_max,a_max,speed,planned_time,mean_time,failure_rate,mean_disposition,mean_xy,mean_z,"
      "pareto_failure,pareto_disposition\n";
  for (const SlalomRow& r : rows) {
    out += fmt::format("{},{},{},{},{},{},{},{},{},{},{},{},{}\n", r.label, r.kind, num(r.a_lat_max), num(r.a_max),
                       num(r.speed), num(r.planned_time), num(r.mean_time), num(r.failure_rate),
                       num(r.mean_disposition), num(r.mean_xy), num(r.mean_z), r.pareto_failure ? 1 : 0,
                       r.pareto_disposition ? 1 : 0);
  }
  return out;
}

std::string slalom_json(const SlalomBenchResult& result, std::uint64_t seed, int runs) {
  ordered_json j;
  j["schema_version"] = kSchemaVersion;
  j["seed"] = seed;
  j["runs"] = runs;
  ordered_json rows = ordered_json::array();
  for (const SlalomRow& r : result.rows) rows.push_back(slalom_row_json(r));
  j["rows"] = std::move(rows);
  j["matched"] = {{"adaptive", slalom_row_json(result.matched_adaptive)},
                  {"constant", slalom_row_json(result.matched_constant)}};
  return dump(j);
}

std::string pyramid_csv(const std::vector<PyramidRow>& rows) {
  std::string out = "c_slope,path_length,inside_length,climb,coarse_cost\n";
  for (const PyramidRow& r : rows) {
    out += fmt::format("{},{},{},{},{}\n", num(r.c_slope), num(r.path_length), num(r.inside_length), num(r.climb),
                       num(r.coarse_cost));
  }
  return out;
}

std::string pyramid_json(const std::vector<PyramidRow>& rows) {
  ordered_json j;
  j["schema_version"] = kSchemaVersion;
  ordered_json arr = ordered_json::array();
  for (const PyramidRow& r : rows) {
    arr.push_back({{"c_slope", r.c_slope},
                   {"path_length", r.path_length},
                   {"inside_length", r.inside_length},
                   {"climb", r.climb},
                   {"coarse_cost", r.coarse_cost}});
  }
  j["rows"] = std::move(arr);
  return dump(j);
}

std::string random_bench_csv(const RandomBenchResult& result) {
  std::string out = "scene,success,failure,completion_time,planned_time,xy_err,z_err,disposition_err,replan_count\n";
  for (std::size_t i = 0; i < result.reports.size(); ++i) {
    const RunReport& r = result.reports[i];
    out += fmt::format("{},{},{},{},{},{},{},{},{}\n", i, r.success ? 1 : 0, r.failure, num(r.completion_time),
                       num(r.planned_time), num(r.xy_err), num(r.z_err), num(r.disposition_err), r.replan_count);
  }
  return out;
}

std::string random_bench_json(const RandomBenchResult& result, std::uint64_t seed) {
  ordered_json j;
  j["schema_version"] = kSchemaVersion;
  j["seed"] = seed;
  j["scenes"] = result.scenes;
  j["successes"] = result.successes;
  j["success_rate"] = result.success_rate();
  ordered_json f = ordered_json::object();
  for (const auto& [k, v] : result.failures) f[k] = v;
  j["failures"] = std::move(f);
  return dump(j);
}

void write_text_file(const std::string& path, const std::string& content) {
  const std::filesystem::path p(path);
  std::error_code ec;
  if (p.has_parent_path()) std::filesystem::create_directories(p.parent_path(), ec);
  std::ofstream out(p, std::ios::binary);
  if (!out) throw Error(ErrorKind::Io, path, "cannot open for writing");
  out << content;
  if (!out) throw Error(ErrorKind::Io, path, "write failed");
}

std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::Io, path, "cannot open for reading");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace scenepath
