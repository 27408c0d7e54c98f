import math
import xml.etree.ElementTree as ET

import pytest

import scenepath as sp


def test_envelope_anchors():
    assert sp.envelope_vmax(0.4) == 1.0
    assert sp.envelope_vmax(0.8) == 3.0
    assert sp.envelope_vmax(1.2) == 5.0
    assert sp.envelope_vmax(1.47) == 5.0


def test_speed_profile_qp_and_two_pass_agree():
    s = [0.25 * i for i in range(60)]
    caps = [3.0] * 60
    caps[30] = 0.5
    qp = sp.solve_speed_profile(s, caps, a_max=0.5, a_min=-0.3, v_start=0.0, v_end=0.0)
    fb = sp.solve_speed_profile(s, caps, a_max=0.5, a_min=-0.3, v_start=0.0, v_end=0.0, qp=False)
    assert max(abs(a - b) for a, b in zip(qp["beta"], fb["beta"])) < 1e-9
    assert qp["violation"] < 1e-9
    assert qp["completion_time"] == pytest.approx(fb["completion_time"])


def test_plan_random_scene():
    scene = sp.randomize_scene(3)
    route = sp.random_route_text(scene, 3)
    assert route.startswith("start: ")
    out = sp.plan(scene, route)
    assert out["completion_time"] > 0
    assert {"segment", "s", "x", "y", "head_z"} <= set(out["path"][0])
    for row in out["profile"]:
        assert row["v"] <= row["v_cap"] + 1e-9
    assert len(out["summary"]["segments"]) == len(route.strip().splitlines()) - 1


def test_simulate_is_deterministic():
    scene = sp.make_crossing(4, 1)
    route = "start: west\nWalk to the east\n"
    a = sp.simulate(scene, route, seed=9, sigma=0.02)
    b = sp.simulate(scene, route, seed=9, sigma=0.02)
    assert a == b
    assert a["report"]["success"]
    assert a["report"]["replan_count"] >= 1
    assert a["trace"]


def test_errors_carry_a_kind():
    scene = sp.make_pyramid()
    with pytest.raises(sp.ScenepathError) as info:
        sp.plan(scene, "start: west\nWalk to the moon\n")
    assert info.value.kind == "unknown_landmark"
    with pytest.raises(sp.ScenepathError) as info:
        sp.load_scene("{not json")
    assert info.value.kind == "parse"


def test_scene_round_trip():
    scene = sp.make_slalom()
    again = sp.load_scene(scene.to_json())
    assert again.to_json() == scene.to_json()
    assert again.landmarks == ["start", "finish"]
    assert math.isinf(scene.clearance(1.0, 1.0))


def test_svgs_are_well_formed():
    scene = sp.randomize_scene(5)
    svg = sp.render_svg(scene, sp.random_route_text(scene, 5))
    root = ET.fromstring(svg)
    assert root.tag.endswith("svg")
    assert svg.count("<polyline") >= 1
    bench = sp.slalom_bench(seed=1, runs=5)
    for key in ("pareto_failure_svg", "pareto_disposition_svg"):
        ET.fromstring(bench[key])
    assert {r["kind"] for r in bench["rows"]} == {"qp", "constant"}


def test_pyramid_sweep_detours():
    rows = sp.pyramid_sweep([0.0, 3.0])
    assert rows[0]["inside_length"] > 0
    assert rows[1]["inside_length"] == 0


def test_speed_color_anchors():
    assert sp.speed_color(1.0) == "#0000ff"
    assert sp.speed_color(3.5) == "#ff0000"
