#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "scenepath/bench.hpp"
#include "scenepath/error.hpp"
#include "scenepath/io.hpp"
#include "scenepath/render.hpp"

namespace py = pybind11;
namespace sp = scenepath;

namespace {

struct Options {
  std::optional<double> c_slope, a_max, a_min, a_lat_max, sigma, constant_speed;
  std::optional<bool> stop_at_landmarks, replanning;
};

sp::PlannerConfig planner_config(const Options& o, sp::PlannerConfig cfg = {}) {
  if (o.c_slope) cfg.graph.c_slope = *o.c_slope;
  if (o.a_max) cfg.envelope.a_max = *o.a_max;
  if (o.a_min) cfg.envelope.a_min = *o.a_min;
  if (o.a_lat_max) cfg.envelope.a_lat_max = *o.a_lat_max;
  if (o.stop_at_landmarks) cfg.stop_at_landmarks = *o.stop_at_landmarks;
  if (o.constant_speed) cfg.constant_speed = *o.constant_speed;
  return sp::consistent(cfg);
}

sp::SimConfig sim_config(const Options& o, sp::SimConfig cfg = {}) {
  cfg.planner = planner_config(o, cfg.planner);
  cfg.tracker.envelope = cfg.planner.envelope;
  if (o.sigma) cfg.tracker.sigma.fill(*o.sigma);
  if (o.replanning) cfg.replanning = *o.replanning;
  return cfg;
}

sp::RoutePlan plan(const sp::Scene& scene, const std::string& route, const Options& o) {
  const sp::RouteRequest request = sp::parse_route_file_text(route, scene);
  const sp::PlannerConfig cfg = planner_config(o);
  return sp::plan_route(scene, sp::build_graph(scene, cfg.graph), request, cfg);
}

#define SCENEPATH_OPTIONS                                                                                  \
  py::kw_only(), py::arg("c_slope") = py::none(), py::arg("a_max") = py::none(),                          \
      py::arg("a_min") = py::none(), py::arg("a_lat_max") = py::none(), py::arg("sigma") = py::none(),    \
      py::arg("constant_speed") = py::none(), py::arg("stop_at_landmarks") = py::none(),                  \
      py::arg("replanning") = py::none()

#define SCENEPATH_OPTION_PARAMS                                                                              \
  std::optional<double> c_slope, std::optional<double> a_max, std::optional<double> a_min,                  \
      std::optional<double> a_lat_max, std::optional<double> sigma, std::optional<double> constant_speed, \
      std::optional<bool> stop_at_landmarks, std::optional<bool> replanning

#define SCENEPATH_OPTION_VALUES \
  Options { c_slope, a_max, a_min, a_lat_max, sigma, constant_speed, stop_at_landmarks, replanning }

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Scene-aware path planning, speed profiles and closed-loop simulation";

  static py::exception<sp::Error> error(m, "ScenepathError");
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const sp::Error& e) {
      py::object exc = py::reinterpret_borrow<py::object>(error.ptr())(e.what());
      exc.attr("kind") = sp::to_string(e.kind());
      exc.attr("where") = e.where();
      PyErr_SetObject(error.ptr(), exc.ptr());
    }
  });

  py::class_<sp::Scene>(m, "Scene")
      .def("to_json", [](const sp::Scene& s) { return sp::save_scene(s); })
      .def_property_readonly("landmarks",
                             [](const sp::Scene& s) {
                               std::vector<std::string> names;
                               for (const sp::Landmark& l : s.landmarks) names.push_back(l.name);
                               return names;
                             })
      .def("terrain_height", [](const sp::Scene& s, double x, double y) { return s.terrain_height({x, y}); })
      .def("clearance", [](const sp::Scene& s, double x, double y) { return s.clearance_at({x, y}); });

  m.def("load_scene", [](const std::string& text) { return sp::load_scene(text); }, py::arg("text"));
  m.def("load_scene_file", &sp::load_scene_file, py::arg("path"));
  m.def("randomize_scene", [](std::uint64_t seed) { return sp::randomize_scene(seed); }, py::arg("seed"));
  m.def("make_slalom", [] { return sp::make_slalom(); });
  m.def("make_pyramid", [] { return sp::make_pyramid(); });
  m.def("make_crossing", [](std::uint64_t seed, std::uint64_t index) { return sp::make_crossing(seed, index); },
        py::arg("seed"), py::arg("index") = 0);
  m.def("random_route_text",
        [](const sp::Scene& scene, std::uint64_t seed) {
          sp::Rng rng(seed);
          const sp::RouteRequest r = sp::random_route(scene, rng);
          std::string out = "start: " + r.instructions.front().source + "\n";
          for (const sp::Instruction& i : r.instructions) out += sp::render_instruction(i) + "\n";
          return out;
        },
        py::arg("scene"), py::arg("seed"));

  m.def("envelope_vmax", [](double z) { return sp::envelope_vmax(z); }, py::arg("head_z"));
  m.def("speed_color", [](double v) { return sp::speed_color(v); }, py::arg("speed"));

  m.def(
      "solve_speed_profile",
      [](std::vector<double> s, std::vector<double> caps, double a_max, double a_min, double v_start,
         std::optional<double> v_end, bool qp) {
        sp::SpeedProblem p;
        p.s = std::move(s);
        p.caps = std::move(caps);
        p.a_max = a_max;
        p.a_min = a_min;
        p.v_start = v_start;
        p.v_end = v_end;
        const sp::SpeedProfile prof = qp ? sp::solve_min_time_qp(p) : sp::forward_backward_oracle(p);
        py::dict d;
        d["beta"] = prof.beta;
        d["v"] = prof.v;
        d["t"] = prof.t;
        d["completion_time"] = prof.completion_time;
        d["violation"] = sp::profile_violation(p, prof);
        return d;
      },
      py::arg("s"), py::arg("caps"), py::arg("a_max") = 0.5, py::arg("a_min") = -0.1, py::arg("v_start") = 0.0,
      py::arg("v_end") = py::none(), py::arg("qp") = true);

  m.def(
      "plan",
      [](const sp::Scene& scene, const std::string& route, SCENEPATH_OPTION_PARAMS) {
        const sp::RoutePlan p = plan(scene, route, SCENEPATH_OPTION_VALUES);
        py::dict d;
        d["summary"] = sp::plan_summary_json(p);
        d["path"] = sp::route_path_csv(p);
        d["profile"] = sp::route_profile_csv(p);
        d["trajectory"] = sp::route_trajectory_csv(p);
        d["completion_time"] = p.completion_time;
        return d;
      },
      py::arg("scene"), py::arg("route"), SCENEPATH_OPTIONS);

  m.def(
      "simulate",
      [](const sp::Scene& scene, const std::string& route, std::uint64_t seed, SCENEPATH_OPTION_PARAMS) {
        sp::SimConfig cfg = sim_config(SCENEPATH_OPTION_VALUES);
        cfg.record_trace = true;
        const sp::RunReport r = sp::run_route(scene, sp::parse_route_file_text(route, scene), cfg, seed);
        py::dict d;
        d["report"] = sp::run_report_json(r, seed);
        d["trace"] = sp::trace_csv(r.trace);
        return d;
      },
      py::arg("scene"), py::arg("route"), py::arg("seed") = 0, SCENEPATH_OPTIONS);

  m.def(
      "render_svg",
      [](const sp::Scene& scene, std::optional<std::string> route, SCENEPATH_OPTION_PARAMS) {
        std::vector<sp::PathLayer> layers;
        if (route) {
          const sp::RoutePlan p = plan(scene, *route, SCENEPATH_OPTION_VALUES);
          for (std::size_t i = 0; i < p.segments.size(); ++i) {
            layers.push_back(sp::path_layer("segment " + std::to_string(i), p.segments[i].path,
                                            p.segments[i].profile));
          }
        }
        return sp::render_svg(scene, layers);
      },
      py::arg("scene"), py::arg("route") = py::none(), SCENEPATH_OPTIONS);

  m.def(
      "slalom_bench",
      [](std::uint64_t seed, int runs, std::optional<double> sigma) {
        sp::SlalomBenchConfig cfg;
        cfg.sim = sim_config({}, sp::slalom_sim_defaults());
        cfg.runs = runs;
        if (sigma) cfg.sigma = *sigma;
        const sp::SlalomBenchResult r = sp::slalom_bench(cfg, seed);
        py::dict d;
        d["summary"] = sp::slalom_json(r, seed, runs);
        d["table"] = sp::slalom_csv(r.rows);
        d["pareto_failure_svg"] = sp::pareto_svg(r.rows, false);
        d["pareto_disposition_svg"] = sp::pareto_svg(r.rows, true);
        return d;
      },
      py::arg("seed") = 0, py::arg("runs") = 100, py::arg("sigma") = py::none());

  m.def(
      "pyramid_sweep", [](const std::vector<double>& c_values) { return sp::pyramid_csv(sp::pyramid_sweep(c_values)); },
      py::arg("c_values"));

  m.def(
      "random_bench",
      [](std::uint64_t seed, int scenes, std::optional<double> sigma) {
        sp::RandomBenchConfig cfg;
        cfg.scenes = scenes;
        Options o;
        o.sigma = sigma;
        cfg.sim = sim_config(o);
        const sp::RandomBenchResult r = sp::randomized_route_bench(cfg, seed);
        py::dict d;
        d["summary"] = sp::random_bench_json(r, seed);
        d["table"] = sp::random_bench_csv(r);
        return d;
      },
      py::arg("seed") = 0, py::arg("scenes") = 100, py::arg("sigma") = py::none());

  m.def("csv_to_json", &sp::csv_to_json, py::arg("csv"));
}
