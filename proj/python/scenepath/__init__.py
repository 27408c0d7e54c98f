"""Scene-aware path planning with speed profiles and a closed-loop walker simulation."""

import json

from ._core import (
    Scene,
    ScenepathError,
    csv_to_json,
    envelope_vmax,
    load_scene,
    load_scene_file,
    make_crossing,
    make_pyramid,
    make_slalom,
    random_route_text,
    randomize_scene,
    render_svg,
    solve_speed_profile,
    speed_color,
)
from . import _core

__all__ = [
    "Scene",
    "ScenepathError",
    "csv_to_json",
    "envelope_vmax",
    "load_scene",
    "load_scene_file",
    "make_crossing",
    "make_pyramid",
    "make_slalom",
    "plan",
    "pyramid_sweep",
    "random_bench",
    "random_route_text",
    "randomize_scene",
    "render_svg",
    "simulate",
    "slalom_bench",
    "solve_speed_profile",
    "speed_color",
]


def _rows(csv_text):
    return json.loads(csv_to_json(csv_text))


def plan(scene, route, **options):
    """Plan a route given as route-file text ("start: X" then one instruction per line)."""
    out = _core.plan(scene, route, **options)
    return {
        "completion_time": out["completion_time"],
        "summary": json.loads(out["summary"]),
        "path": _rows(out["path"]),
        "profile": _rows(out["profile"]),
        "trajectory": _rows(out["trajectory"]),
    }


def simulate(scene, route, seed=0, **options):
    out = _core.simulate(scene, route, seed, **options)
    return {"report": json.loads(out["report"]), "trace": _rows(out["trace"])}


def slalom_bench(seed=0, runs=100, sigma=None):
    out = _core.slalom_bench(seed, runs, sigma)
    return {
        "summary": json.loads(out["summary"]),
        "rows": _rows(out["table"]),
        "pareto_failure_svg": out["pareto_failure_svg"],
        "pareto_disposition_svg": out["pareto_disposition_svg"],
    }


def pyramid_sweep(c_values=(0.0, 0.6, 1.2, 1.8, 2.4, 3.0)):
    return _rows(_core.pyramid_sweep(list(c_values)))


def random_bench(seed=0, scenes=100, sigma=None):
    out = _core.random_bench(seed, scenes, sigma)
    return {"summary": json.loads(out["summary"]), "rows": _rows(out["table"])}
