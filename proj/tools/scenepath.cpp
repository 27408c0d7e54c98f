#include <cstdint>
#include <filesystem>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <fmt/format.h>
#include <json.hpp>

#include "scenepath/bench.hpp"
#include "scenepath/error.hpp"
#include "scenepath/io.hpp"
#include "scenepath/render.hpp"

namespace sp = scenepath;
using json = nlohmann::json;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitPlanning = 2;
constexpr int kExitIo = 3;

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Every numeric flag has a config-file key of the same name with dashes
// replaced by underscores.
struct Settings {
  std::optional<double> c_slope, slope_limit, agent_radius, a_max, a_min, a_lat_max, rate, sigma, dt, constant_speed,
      goal_tolerance, scale, peak;
  std::optional<int> runs, scenes;
  std::optional<bool> stop_at_landmarks, replanning;
  std::optional<std::vector<double>> c_values;
};

template <class T>
void take(std::optional<T>& dst, const std::optional<T>& src) {
  if (src) dst = src;
}

void merge(Settings& base, const Settings& over) {
  take(base.c_slope, over.c_slope);
  take(base.slope_limit, over.slope_limit);
  take(base.agent_radius, over.agent_radius);
  take(base.a_max, over.a_max);
  take(base.a_min, over.a_min);
  take(base.a_lat_max, over.a_lat_max);
  take(base.rate, over.rate);
  take(base.sigma, over.sigma);
  take(base.dt, over.dt);
  take(base.constant_speed, over.constant_speed);
  take(base.goal_tolerance, over.goal_tolerance);
  take(base.scale, over.scale);
  take(base.peak, over.peak);
  take(base.runs, over.runs);
  take(base.scenes, over.scenes);
  take(base.stop_at_landmarks, over.stop_at_landmarks);
  take(base.replanning, over.replanning);
  take(base.c_values, over.c_values);
}

Settings load_config(const std::string& path) {
  json j;
  try {
    j = json::parse(sp::read_text_file(path));
  } catch (const json::exception& e) {
    throw sp::Error(sp::ErrorKind::Parse, path, e.what());
  }
  if (!j.is_object()) throw sp::Error(sp::ErrorKind::Parse, path, "config must be a JSON object");
  Settings s;
  for (const auto& [key, value] : j.items()) {
    const std::string where = path + ": " + key;
    auto num = [&](std::optional<double>& dst) {
      if (!value.is_number()) throw sp::Error(sp::ErrorKind::Parse, where, "expected a number");
      dst = value.get<double>();
    };
    auto integer = [&](std::optional<int>& dst) {
      if (!value.is_number_integer()) throw sp::Error(sp::ErrorKind::Parse, where, "expected an integer");
      dst = value.get<int>();
    };
    auto boolean = [&](std::optional<bool>& dst) {
      if (!value.is_boolean()) throw sp::Error(sp::ErrorKind::Parse, where, "expected true or false");
      dst = value.get<bool>();
    };
    if (key == "c_slope") num(s.c_slope);
    else if (key == "slope_limit") num(s.slope_limit);
    else if (key == "agent_radius") num(s.agent_radius);
    else if (key == "a_max") num(s.a_max);
    else if (key == "a_min") num(s.a_min);
    else if (key == "a_lat_max") num(s.a_lat_max);
    else if (key == "rate") num(s.rate);
    else if (key == "sigma") num(s.sigma);
    else if (key == "dt") num(s.dt);
    else if (key == "constant_speed") num(s.constant_speed);
    else if (key == "goal_tolerance") num(s.goal_tolerance);
    else if (key == "scale") num(s.scale);
    else if (key == "peak") num(s.peak);
    else if (key == "runs") integer(s.runs);
    else if (key == "scenes") integer(s.scenes);
    else if (key == "stop_at_landmarks") boolean(s.stop_at_landmarks);
    else if (key == "replanning") boolean(s.replanning);
    else if (key == "c_values") {
      if (!value.is_array()) throw sp::Error(sp::ErrorKind::Parse, where, "expected an array of numbers");
      std::vector<double> v;
      for (const json& x : value) {
        if (!x.is_number()) throw sp::Error(sp::ErrorKind::Parse, where, "expected an array of numbers");
        v.push_back(x.get<double>());
      }
      s.c_values = v;
    } else {
      throw sp::Error(sp::ErrorKind::Parse, where, "unknown config key");
    }
  }
  return s;
}

struct Globals {
  std::string scene;
  std::string route;
  std::uint64_t seed = 0;
  std::string config;
  std::string out_dir = ".";
  std::string format = "csv";
  Settings flags;
};

Settings resolve(const Globals& g) {
  Settings s;
  if (!g.config.empty()) s = load_config(g.config);
  merge(s, g.flags);
  return s;
}

sp::PlannerConfig planner_config(const Settings& s, sp::PlannerConfig cfg = {}) {
  if (s.c_slope) cfg.graph.c_slope = *s.c_slope;
  if (s.slope_limit) cfg.graph.slope_limit = *s.slope_limit;
  if (s.agent_radius) cfg.graph.agent_radius = *s.agent_radius;
  if (s.a_max) cfg.envelope.a_max = *s.a_max;
  if (s.a_min) cfg.envelope.a_min = *s.a_min;
  if (s.a_lat_max) cfg.envelope.a_lat_max = *s.a_lat_max;
  if (s.rate) cfg.rate = *s.rate;
  if (s.stop_at_landmarks) cfg.stop_at_landmarks = *s.stop_at_landmarks;
  if (s.constant_speed) cfg.constant_speed = *s.constant_speed;
  return sp::consistent(cfg);
}

sp::SimConfig sim_config(const Settings& s, sp::SimConfig cfg = {}) {
  cfg.planner = planner_config(s, cfg.planner);
  cfg.tracker.envelope = cfg.planner.envelope;
  if (s.sigma) cfg.tracker.sigma.fill(*s.sigma);
  if (s.dt) cfg.dt = *s.dt;
  if (s.goal_tolerance) cfg.goal_tolerance = *s.goal_tolerance;
  if (s.replanning) cfg.replanning = *s.replanning;
  return cfg;
}

std::string out_path(const Globals& g, const std::string& name) {
  return (std::filesystem::path(g.out_dir) / name).string();
}

void write_table(const Globals& g, const std::string& stem, const std::string& csv) {
  if (g.format == "json") {
    sp::write_text_file(out_path(g, stem + ".json"), sp::csv_to_json(csv));
  } else {
    sp::write_text_file(out_path(g, stem + ".csv"), csv);
  }
}

sp::Scene require_scene(const Globals& g) {
  if (g.scene.empty()) throw UsageError("--scene is required");
  return sp::load_scene_file(g.scene);
}

sp::RouteRequest require_route(const Globals& g, const sp::Scene& scene) {
  if (g.route.empty()) throw UsageError("--route is required");
  return sp::load_route_file(g.route, scene);
}

std::string route_text(const sp::RouteRequest& request) {
  std::string out;
  if (!request.instructions.empty()) out += "start: " + request.instructions.front().source + "\n";
  for (const sp::Instruction& i : request.instructions) out += sp::render_instruction(i) + "\n";
  return out;
}

void announce(const std::string& path) { std::cout << path << "\n"; }

void write_and_announce(const std::string& path, const std::string& content) {
  sp::write_text_file(path, content);
  announce(path);
}

int cmd_plan(const Globals& g) {
  const Settings s = resolve(g);
  const sp::Scene scene = require_scene(g);
  const sp::RouteRequest request = require_route(g, scene);
  const sp::PlannerConfig cfg = planner_config(s);
  const sp::GridGraph graph = sp::build_graph(scene, cfg.graph);
  const sp::RoutePlan plan = sp::plan_route(scene, graph, request, cfg);
  write_table(g, "path", sp::route_path_csv(plan));
  write_table(g, "profile", sp::route_profile_csv(plan));
  write_table(g, "trajectory", sp::route_trajectory_csv(plan));
  write_and_announce(out_path(g, "plan.json"), sp::plan_summary_json(plan));
  std::cout << fmt::format("completion_time {}\n", plan.completion_time);
  return kExitOk;
}

int cmd_simulate(const Globals& g) {
  const Settings s = resolve(g);
  const sp::Scene scene = require_scene(g);
  const sp::RouteRequest request = require_route(g, scene);
  sp::SimConfig cfg = sim_config(s);
  cfg.record_trace = true;
  const sp::RunReport report = sp::run_route(scene, request, cfg, g.seed);
  write_table(g, "trace", sp::trace_csv(report.trace));
  write_and_announce(out_path(g, "report.json"), sp::run_report_json(report, g.seed));
  std::cout << fmt::format("success {} completion_time {} disposition_err {}\n", report.success ? "true" : "false",
                           report.completion_time, report.disposition_err);
  return kExitOk;
}

std::vector<double> default_c_values() { return {0.0, 0.6, 1.2, 1.8, 2.4, 3.0}; }

int cmd_bench(const Globals& g, const std::string& kind) {
  const Settings s = resolve(g);
  if (kind == "slalom") {
    sp::SlalomBenchConfig cfg;
    cfg.sim = sim_config(s, sp::slalom_sim_defaults());
    if (s.sigma) cfg.sigma = *s.sigma;
    if (s.runs) cfg.runs = *s.runs;
    if (cfg.runs <= 0) throw UsageError("--runs must be positive");
    const sp::SlalomBenchResult r = sp::slalom_bench(cfg, g.seed);
    if (g.format == "json") {
      write_and_announce(out_path(g, "slalom.json"), sp::slalom_json(r, g.seed, cfg.runs));
    } else {
      write_and_announce(out_path(g, "slalom.csv"), sp::slalom_csv(r.rows));
    }
    write_and_announce(out_path(g, "pareto_failure.svg"), sp::pareto_svg(r.rows, false));
    write_and_announce(out_path(g, "pareto_disposition.svg"), sp::pareto_svg(r.rows, true));
    sp::PathLayer reference = sp::reference_layer("reference", r.adaptive_path);
    std::vector<sp::PathLayer> adaptive{reference, sp::trace_layer("adaptive", r.adaptive_trace)};
    std::vector<sp::PathLayer> constant{reference, sp::trace_layer("constant", r.constant_trace)};
    write_and_announce(out_path(g, "slalom_adaptive.svg"), sp::render_svg(r.scene, adaptive));
    write_and_announce(out_path(g, "slalom_constant.svg"), sp::render_svg(r.scene, constant));
    for (const sp::SlalomRow& row : r.rows) {
      std::cout << fmt::format("{:<14} time {:7.3f}  failure {:5.3f}  disposition {:6.4f}{}\n", row.label,
                               row.mean_time, row.failure_rate, row.mean_disposition,
                               row.pareto_failure && row.pareto_disposition ? "  pareto" : "");
    }
    return kExitOk;
  }
  if (kind == "pyramid") {
    sp::PyramidParams params;
    if (s.peak) params.peak = *s.peak;
    const std::vector<sp::PyramidRow> rows = sp::pyramid_sweep(s.c_values.value_or(default_c_values()), params);
    if (g.format == "json") {
      write_and_announce(out_path(g, "pyramid.json"), sp::pyramid_json(rows));
    } else {
      write_and_announce(out_path(g, "pyramid.csv"), sp::pyramid_csv(rows));
    }
    for (const sp::PyramidRow& row : rows) {
      std::cout << fmt::format("c_slope {:4.2f}  length {:7.3f}  inside {:6.3f}\n", row.c_slope, row.path_length,
                               row.inside_length);
    }
    return kExitOk;
  }
  if (kind == "random") {
    sp::RandomBenchConfig cfg;
    cfg.sim = sim_config(s);
    if (s.scenes) cfg.scenes = *s.scenes;
    if (cfg.scenes <= 0) throw UsageError("--scenes must be positive");
    const sp::RandomBenchResult r = sp::randomized_route_bench(cfg, g.seed);
    write_table(g, "random", sp::random_bench_csv(r));
    write_and_announce(out_path(g, "random_summary.json"), sp::random_bench_json(r, g.seed));
    std::cout << fmt::format("success_rate {} ({}/{})\n", r.success_rate(), r.successes, r.scenes);
    return kExitOk;
  }
  throw UsageError("unknown bench kind '" + kind + "'");
}

int cmd_randomize(const Globals& g, const std::string& preset) {
  sp::Scene scene;
  sp::RouteRequest route;
  if (preset == "random") {
    sp::Rng rng = sp::Rng::derive(g.seed, 0);
    scene = sp::randomize_scene(rng.next());
    route = sp::random_route(scene, rng);
  } else if (preset == "slalom") {
    scene = sp::make_slalom();
    route = sp::parse_route({"Run to the finish"}, "start", scene);
  } else if (preset == "pyramid") {
    scene = sp::make_pyramid();
    route = sp::parse_route({"Walk to the east"}, "west", scene);
  } else if (preset == "crossing") {
    scene = sp::make_crossing(g.seed, 0);
    route = sp::crossing_route(scene);
  } else {
    throw UsageError("unknown preset '" + preset + "'");
  }
  write_and_announce(out_path(g, "scene.json"), sp::save_scene(scene));
  write_and_announce(out_path(g, "route.txt"), route_text(route));
  return kExitOk;
}

std::vector<sp::TraceRow> read_trace(const std::string& path) {
  std::istringstream in(sp::read_text_file(path));
  std::string line;
  std::getline(in, line);
  if (line.rfind("t,segment,x,y,head_z,z,speed", 0) != 0) throw sp::Error(sp::ErrorKind::Parse, path, "not a trace CSV");
  std::vector<sp::TraceRow> rows;
  int n = 1;
  while (std::getline(in, line)) {
    ++n;
    if (line.empty()) continue;
    std::vector<double> v;
    std::istringstream ls(line);
    std::string cell;
    try {
      while (std::getline(ls, cell, ',')) v.push_back(std::stod(cell));
    } catch (const std::exception&) {
      throw sp::Error(sp::ErrorKind::Parse, path + ":" + std::to_string(n), "bad number");
    }
    if (v.size() < 7) throw sp::Error(sp::ErrorKind::Parse, path + ":" + std::to_string(n), "too few columns");
    sp::TraceRow r{};
    r.t = v[0];
    r.segment = static_cast<int>(v[1]);
    r.position = {v[2], v[3]};
    r.head_z = v[4];
    r.z = v[5];
    r.speed = v[6];
    rows.push_back(r);
  }
  return rows;
}

int cmd_render(const Globals& g, const std::string& trace_path, const std::string& name) {
  const Settings s = resolve(g);
  const sp::Scene scene = require_scene(g);
  sp::RenderSpec spec;
  if (s.scale) spec.scale = *s.scale;
  std::vector<sp::PathLayer> layers;
  if (!g.route.empty()) {
    const sp::RouteRequest request = sp::load_route_file(g.route, scene);
    const sp::PlannerConfig cfg = planner_config(s);
    const sp::GridGraph graph = sp::build_graph(scene, cfg.graph);
    const sp::RoutePlan plan = sp::plan_route(scene, graph, request, cfg);
    for (std::size_t k = 0; k < plan.segments.size(); ++k) {
      const sp::SegmentPlan& seg = plan.segments[k];
      if (trace_path.empty()) {
        layers.push_back(sp::path_layer(fmt::format("plan-{}", k), seg.path, seg.profile));
      } else {
        layers.push_back(sp::reference_layer(fmt::format("reference-{}", k), seg.path));
      }
    }
  }
  if (!trace_path.empty()) layers.push_back(sp::trace_layer("trace", read_trace(trace_path)));
  write_and_announce(out_path(g, name), sp::render_svg(scene, layers, spec));
  return kExitOk;
}

int exit_code(sp::ErrorKind kind) {
  switch (kind) {
    case sp::ErrorKind::Parse:
    case sp::ErrorKind::Validation:
    case sp::ErrorKind::Io:
    case sp::ErrorKind::UnknownId:
    case sp::ErrorKind::UnknownVerb:
    case sp::ErrorKind::UnknownLandmark:
    case sp::ErrorKind::MissingSource:
    case sp::ErrorKind::ChainBreak:
    case sp::ErrorKind::OutOfExtent:
      return kExitIo;
    default:
      return kExitPlanning;
  }
}

void diagnose(const std::string& command, const std::string& kind, const std::string& where,
              const std::string& message) {
  json d;
  d["command"] = command;
  d["error"] = kind;
  d["where"] = where;
  d["message"] = message;
  std::cerr << d.dump() << "\n";
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "Scene-aware path planning: plan, simulate, benchmark, randomize scenes and render SVG figures.\n"
      "Numeric settings come from defaults, then the --config JSON file (keys are the flag names with\n"
      "underscores, e.g. {\"c_slope\": 3}), then command-line flags; later sources win."};
  app.require_subcommand(1);
  app.fallthrough();

  Globals g;
  app.add_option("--scene", g.scene, "Scene JSON file");
  app.add_option("--route", g.route, "Route file: 'start: <landmark>' then one instruction per line");
  app.add_option("--seed", g.seed, "Random seed")->capture_default_str();
  app.add_option("--config", g.config, "JSON config file");
  app.add_option("--out-dir", g.out_dir, "Output directory")->capture_default_str();
  app.add_option("--format", g.format, "Table format")->check(CLI::IsMember({"csv", "json"}))->capture_default_str();

  Settings& f = g.flags;
  app.add_option("--c-slope", f.c_slope, "Slope weight c in d*exp(c*slope) for A*");
  app.add_option("--slope-limit", f.slope_limit, "Steepest walkable |dh|/d");
  app.add_option("--agent-radius", f.agent_radius, "Agent radius for wall inflation (m)");
  app.add_option("--a-max", f.a_max, "Max tangential acceleration (m/s^2)");
  app.add_option("--a-min", f.a_min, "Max deceleration, negative (m/s^2)");
  app.add_option("--a-lat-max", f.a_lat_max, "Max lateral acceleration (m/s^2)");
  app.add_option("--rate", f.rate, "Trajectory waypoint rate (Hz)");
  app.add_option("--sigma", f.sigma, "Lateral noise sigma on every terrain class (m/sqrt(s))");
  app.add_option("--dt", f.dt, "Simulation step (s)");
  app.add_option("--constant-speed", f.constant_speed, "Ignore speed caps and hold this speed (m/s)");
  app.add_option("--goal-tolerance", f.goal_tolerance, "Distance counting as reaching a landmark (m)");
  app.add_option("--scale", f.scale, "SVG pixels per meter");
  app.add_option("--peak", f.peak, "Pyramid height (m)");
  app.add_option("--runs", f.runs, "Slalom runs per configuration");
  app.add_option("--scenes", f.scenes, "Scenes in the randomized bench");
  app.add_option("--stop-at-landmarks", f.stop_at_landmarks, "Stop at every intermediate landmark (true/false)");
  app.add_option("--replanning", f.replanning, "Replan on collision forecasts (true/false)");
  app.add_option("--c-values", f.c_values, "Pyramid sweep values of c_slope")->delimiter(',');

  CLI::App* plan = app.add_subcommand("plan", "Plan a route: path, profile and trajectory tables plus plan.json");
  CLI::App* simulate = app.add_subcommand("simulate", "Plan and track a route: report.json plus trace table");
  CLI::App* bench = app.add_subcommand("bench", "Run a benchmark: slalom, pyramid or random");
  std::string bench_kind;
  bench->add_option("kind", bench_kind, "slalom | pyramid | random")
      ->required()
      ->check(CLI::IsMember({"slalom", "pyramid", "random"}));
  CLI::App* randomize = app.add_subcommand("randomize", "Write a scene.json and route.txt");
  std::string preset = "random";
  randomize->add_option("--preset", preset, "random | slalom | pyramid | crossing")
      ->check(CLI::IsMember({"random", "slalom", "pyramid", "crossing"}))
      ->capture_default_str();
  CLI::App* render = app.add_subcommand("render", "Draw the scene, the planned route and a trace as SVG");
  std::string trace_path;
  std::string svg_name = "scene.svg";
  render->add_option("--trace", trace_path, "Trace CSV from simulate, drawn over the plan");
  render->add_option("--name", svg_name, "Output file name")->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitUsage;
  }

  std::string command = app.get_subcommands().front()->get_name();
  try {
    if (plan->parsed()) return cmd_plan(g);
    if (simulate->parsed()) return cmd_simulate(g);
    if (bench->parsed()) return cmd_bench(g, bench_kind);
    if (randomize->parsed()) return cmd_randomize(g, preset);
    if (render->parsed()) return cmd_render(g, trace_path, svg_name);
  } catch (const UsageError& e) {
    diagnose(command, "usage", "", e.what());
    return kExitUsage;
  } catch (const sp::Error& e) {
    diagnose(command, sp::to_string(e.kind()), e.where(), e.what());
    return exit_code(e.kind());
  } catch (const std::exception& e) {
    diagnose(command, "internal", "", e.what());
    return kExitPlanning;
  }
  return kExitUsage;
}
