import csv
import io
import json
import math

import numpy as np
import pytest

from shootbeam import cli
from shootbeam import model_io as mi
from shootbeam.errors import ModelError
from shootbeam.solver import DofMap, key_label, run_analysis

MINIMAL = {
    "nodes": [[0, 0], [1, 0]],
    "elements": [{"a": 0, "b": 1, "EA": 1e4, "EI": 1}],
    "supports": [{"node": 0, "dofs": ["u", "w", "phi"], "kind": "fixed"}],
    "loads": [{"node": 1, "dof": "w", "value": 0.1}],
}


def _text(doc):
    return json.dumps(doc)


# parsing

def test_minimal_file_parses():
    m = mi.parse_model(_text(MINIMAL))
    assert len(m.elements) == 1
    assert m.elements[0].N == mi.DEFAULT_N


def test_duplicate_constraint_names_the_node():
    doc = json.loads(_text(MINIMAL))
    doc["supports"].append({"node": 0, "dofs": ["u"], "kind": "fixed"})
    with pytest.raises(ModelError, match="node 0"):
        mi.parse_model(_text(doc))


def test_unknown_key_is_rejected_with_path():
    doc = json.loads(_text(MINIMAL))
    doc["elements"][0]["GJ"] = 3.0
    with pytest.raises(ModelError, match=r"\$\.elements\[0\]"):
        mi.parse_model(_text(doc))
    doc = json.loads(_text(MINIMAL))
    doc["material"] = {}
    with pytest.raises(ModelError):
        mi.parse_model(_text(doc))


def test_bad_value_reports_json_path():
    doc = json.loads(_text(MINIMAL))
    doc["elements"][0]["EA"] = -1
    with pytest.raises(ModelError, match=r"\$\.elements\[0\]\.EA"):
        mi.parse_model(_text(doc))


def test_malformed_json_reports_position():
    with pytest.raises(ModelError, match="line 1 column"):
        mi.parse_model('{"nodes": [')


def test_unknown_perturbation_node_rejected():
    doc = json.loads(_text(MINIMAL))
    doc["solver"] = {"perturbation": {"node": 5, "moment": 1e-4}}
    with pytest.raises(ModelError, match="perturbation"):
        mi.parse_model(_text(doc))


def test_square_quarter_has_five_unknowns():
    m = mi.model_from_dict(mi.gen_frames()["square_quarter"])
    dm = DofMap(m)
    assert (len(m.nodes), len(m.elements), dm.n_free) == (3, 2, 5)
    assert [key_label(k) for k in dm.free_keys] == ["u0", "u1", "w1", "phi1", "w2"]


def test_diamond_quarter_has_three_unknowns_and_a_hinge():
    m = mi.model_from_dict(mi.gen_frames()["diamond_quarter"])
    assert len(m.elements) == 1 and m.hinges
    assert DofMap(m).n_free == 3


def test_buckling_cantilever_fixes_one_node():
    doc = mi.gen_frames()["buckling_cantilever"]
    assert len(doc["elements"]) == 1
    assert doc["supports"] == [{"node": 1, "dofs": ["u", "w", "phi"], "kind": "fixed"}]


# generators

def _all_generated():
    frames = mi.gen_frames(perturbation=1e-4)
    return {
        "cantilever_moment": mi.gen_cantilever_moment(),
        "toggle_1": mi.gen_williams_toggle(0.0247),
        "toggle_2": mi.gen_williams_toggle(0.02985),
        "toggle_flat": mi.gen_williams_toggle(0.0),
        **frames,
        "honeycomb_1": mi.gen_honeycomb(mi.HoneycombSpec(n=1)),
        "honeycomb_3_layer": mi.gen_honeycomb(mi.HoneycombSpec(n=3, add_boundary_layer=True,
                                                               mode="compression")),
        "cell_tension": mi.gen_periodic_cell(mode="tension"),
        "cell_compression": mi.gen_periodic_cell(mode="compression"),
    }


@pytest.mark.parametrize("name", sorted(_all_generated()))
def test_generated_models_round_trip(name):
    doc = _all_generated()[name]
    m = mi.parse_model(mi.dumps(doc))
    again = mi.model_to_dict(m)
    m2 = mi.parse_model(mi.dumps(again))
    assert mi.model_to_dict(m2) == again
    assert m2.nodes == m.nodes and m2.constraints == m.constraints
    assert m2.loads == m.loads and m2.hinges == m.hinges


def test_cantilever_moment_reaches_full_circle_in_six_steps():
    doc = mi.gen_cantilever_moment(L=2.0, EI=3.0, N=100, steps=6)
    m = mi.model_from_dict(doc)
    assert m.n_steps == 6 and m.elements[0].N == 100
    assert doc["loads"][0]["value"] == pytest.approx(2 * math.pi * 3.0 / 2.0)
    assert mi.gen_cantilever_moment()["loads"][0]["value"] == pytest.approx(2 * math.pi)
    with pytest.raises(ValueError):
        mi.gen_cantilever_moment(steps=0)


def test_toggle_geometry_and_constraints():
    doc = mi.gen_williams_toggle(0.0247)
    (x0, z0), (x1, z1) = doc["nodes"]
    assert math.hypot(x1 - x0, z1 - z0) == pytest.approx(12.94)
    assert math.atan2(-(z1 - z0), x1 - x0) == pytest.approx(0.0247)
    assert doc["elements"][0]["EA"] == 1.885e6 and doc["elements"][0]["EI"] == 9.27e3
    assert {"node": 1, "dofs": ["u", "phi"], "kind": "fixed"} in doc["supports"]
    assert doc["prescribed"][0]["dof"] == "w"


def test_honeycomb_dimensions():
    one = mi.HoneycombSpec(n=1, a=2.0)
    assert one.width == pytest.approx(2.0 * math.sqrt(3))
    assert one.height == pytest.approx(4.0)
    assert mi.HoneycombSpec(n=3).height == pytest.approx(5.0)
    nodes, _ = mi.honeycomb_geometry(3, 1.0)
    xs, zs = zip(*nodes)
    assert max(xs) - min(xs) == pytest.approx(3 * math.sqrt(3))
    assert max(zs) - min(zs) == pytest.approx(5.0)


@pytest.mark.parametrize("n", [1, 3, 5, 11])
def test_honeycomb_counts_match_closed_form(n):
    nodes, pairs = mi.honeycomb_geometry(n, 1.0)
    assert (len(nodes), len(pairs)) == mi.honeycomb_counts(n)
    assert len(set(pairs)) == len(pairs)
    for i, j in pairs:
        assert math.dist(nodes[i], nodes[j]) == pytest.approx(1.0)


def test_honeycomb_single_cell_is_a_hexagon():
    nodes, pairs = mi.honeycomb_geometry(1, 1.0)
    assert (len(nodes), len(pairs)) == (6, 6)
    deg = [sum(k in p for p in pairs) for k in range(6)]
    assert deg == [2] * 6


@pytest.mark.parametrize("n", [3, 5])
def test_honeycomb_supports_and_loaded_nodes(n):
    spec = mi.HoneycombSpec(n=n)
    doc = mi.gen_honeycomb(spec)
    top = [s for s in doc["supports"]]
    assert len(top) == n
    assert sum("u" in s["dofs"] for s in top) == 1
    assert all(doc["nodes"][s["node"]][1] == pytest.approx(0.0) for s in top)
    loaded = doc["prescribed"]
    assert len(loaded) == n
    assert all(doc["nodes"][p["node"]][1] == pytest.approx(spec.height) for p in loaded)
    assert loaded[0]["history"][-1] == pytest.approx(spec.strain_max * spec.height)


def test_honeycomb_boundary_layer_adds_vertical_struts():
    spec = mi.HoneycombSpec(n=3, add_boundary_layer=True, mode="compression")
    doc = mi.gen_honeycomb(spec)
    nodes, pairs = mi.honeycomb_geometry(3, 1.0)
    assert len(doc["elements"]) == len(pairs) + 3
    assert len(doc["nodes"]) == len(nodes) + 3
    assert spec.sample_height == pytest.approx(6.0)
    assert doc["prescribed"][0]["history"][-1] < 0


@pytest.mark.parametrize("kw", [{"n": 2}, {"n": 0}, {"a": 0.0}, {"mode": "shear"}])
def test_honeycomb_spec_rejects_invalid(kw):
    with pytest.raises(ValueError):
        mi.HoneycombSpec(**kw)


def test_periodic_cell_member():
    for mode in ("tension", "compression"):
        doc = mi.gen_periodic_cell(a=1.0, mode=mode)
        (x0, z0), (x1, z1) = doc["nodes"]
        assert math.hypot(x1 - x0, z1 - z0) == pytest.approx(1.0)
        assert math.atan2(z1 - z0, x1 - x0) == pytest.approx(math.pi / 6)
    assert mi.gen_periodic_cell(mode="compression")["prescribed"][0]["history"][-1] < 0
    with pytest.raises(ValueError):
        mi.gen_periodic_cell(mode="shear")


# post-processing

def test_periodic_analytic_curve_starts_at_origin():
    e, s = mi.periodic_cell_analytic_curve(1.0, 1.0, 1.0, "tension", [0.0])
    assert (e[0], s[0]) == (0.0, 0.0)


@pytest.mark.parametrize("mode,alpha,sign", [("tension", 2 * math.pi / 3, 1.0),
                                              ("compression", math.pi / 3, -1.0)])
def test_periodic_analytic_curve_uses_half_strut_cantilever(mode, alpha, sign):
    from shootbeam.analytic import cantilever_solution
    e, s = mi.periodic_cell_analytic_curve(2.0, 1.5, 0.5, mode, [0.2])
    sol = cantilever_solution(0.2, alpha, 1.0, 1.5)
    assert e[0] == pytest.approx(sign * 4 * sol.u_F / 6.0)
    assert s[0] == pytest.approx(sign * 2 * sol.F / (0.5 * 2.0 * math.sqrt(3)))
    assert e[0] * sign > 0 and s[0] * sign > 0


def test_periodic_analytic_curve_secant_slope():
    phis = [1e-3, 2e-3, 3e-3]
    e, s = mi.periodic_cell_analytic_curve(1.0, 1.0, 1.0, "tension", phis)
    s1 = (s[1] - s[0]) / (e[1] - e[0])
    s2 = (s[2] - s[1]) / (e[2] - e[1])
    assert s1 == pytest.approx(s2, rel=1e-2)
    assert s1 > 0


def test_periodic_analytic_curve_propagates_domain_errors():
    from shootbeam.errors import EllipticDomainError
    with pytest.raises(EllipticDomainError):
        mi.periodic_cell_analytic_curve(1.0, 1.0, 1.0, "tension", [math.pi / 2])
    with pytest.raises(ValueError):
        mi.periodic_cell_analytic_curve(1.0, 1.0, 1.0, "shear", [0.1])


def test_strain_correction_spot_value():
    # sigma t a^3 / EI = 30, EA a^2 / EI = 1e4, n = 1, no strain contribution
    term = mi.strain_correction(0.0, 30.0, 1, 1.0, 1.0, 1e4, 1.0)
    assert term == pytest.approx(30.0 / (1e4 * math.sqrt(3)), rel=1e-14)
    assert round(term, 4) == 0.0017


@pytest.mark.parametrize("eps", [-0.1, 0.05, 0.2])
def test_strain_correction_opposes_strain(eps):
    assert mi.strain_correction(eps, 0.0, 3, 1.0, 1.0, 1e4, 1.0) * eps < 0
    assert mi.strain_correction(0.0, 0.0, 3, 1.0, 1.0, 1e4, 1.0) == 0.0


def test_honeycomb_postprocess_of_small_run():
    spec = mi.HoneycombSpec(n=1, strain_max=0.02, steps=2)
    h = run_analysis(mi.model_from_dict(mi.gen_honeycomb(spec)))
    assert h.converged
    lr = mi.honeycomb_postprocess(h, spec)
    assert (lr.sigma[0], lr.eps[0], lr.eps_corrected[0]) == (0.0, 0.0, 0.0)
    assert lr.eps[-1] == pytest.approx(0.02)
    assert lr.sigma[-1] > 0
    assert sum(lr.reactions[-1]) == pytest.approx(lr.sigma[-1] * spec.t * spec.width)
    assert lr.eps_corrected[-1] == pytest.approx(
        0.02 + mi.strain_correction(0.02, lr.sigma[-1], 1, 1.0, 1.0, 1e4, 1.0))


@pytest.mark.parametrize("mode,layer", [("tension", False), ("compression", True)])
def test_honeycomb_three_by_three_run(mode, layer):
    spec = mi.HoneycombSpec(n=3, mode=mode, add_boundary_layer=layer, strain_max=0.06, steps=6)
    h = run_analysis(mi.model_from_dict(mi.gen_honeycomb(spec)))
    assert h.converged
    lr = mi.honeycomb_postprocess(h, spec)
    sign = 1.0 if mode == "tension" else -1.0
    assert lr.eps[-1] == pytest.approx(sign * 0.06)
    assert np.all(sign * np.diff(lr.sigma) > 0)
    if layer:
        assert lr.eps_corrected == lr.eps
    else:
        # the added-layer estimate stiffens the response
        assert abs(lr.eps_corrected[-1]) < abs(lr.eps[-1])


def test_periodic_numeric_curve_starts_at_zero():
    doc = mi.gen_periodic_cell(strain_max=0.01, steps=2, N=20)
    e, s = mi.periodic_cell_numeric_curve(run_analysis(mi.model_from_dict(doc)), 1.0, 1e4)
    assert (e[0], s[0]) == (0.0, 0.0)
    assert len(e) == 3 and np.all(np.diff(e) > 0) and np.all(np.diff(s) > 0)


# output

def _bending_history(N=40, steps=3):
    doc = mi.gen_cantilever_moment(N=N, steps=steps)
    m = mi.model_from_dict(doc)
    return m, run_analysis(m)


def test_csv_outputs_are_deterministic():
    outs = []
    for _ in range(2):
        m, h = _bending_history()
        outs.append([mi.emit_results(h, m, f) for f in ("csv_history", "csv_shapes", "csv_eigen")])
    assert outs[0] == outs[1]


def test_csv_history_columns():
    m, h = _bending_history()
    rows = list(csv.reader(io.StringIO(mi.emit_results(h, m, "csv_history"))))
    assert rows[0][:3] == ["step", "lambda", "iterations"]
    assert "phi1" in rows[0] and "R_u0" in rows[0]
    assert len(rows) == 1 + len(h)
    lam = float(rows[-1][1])
    assert lam == 1.0
    # 17 significant digits round-trip exactly
    col = rows[0].index("phi1")
    assert float(rows[-1][col]) == h[-1].value(h.dofmap, ("n", 1, "phi"))


def test_empty_history_gives_header_only():
    m = mi.model_from_dict(mi.gen_cantilever_moment())
    h = run_analysis(m, schedule=[])
    for fmt in ("csv_history", "csv_shapes", "csv_eigen"):
        text = mi.emit_results(h, m, fmt)
        assert text.count("\n") == 1 and text.endswith("\n")


def test_unknown_format_rejected():
    m, h = _bending_history(N=10, steps=1)
    with pytest.raises(ValueError):
        mi.emit_results(h, m, "csv_everything")


def test_bending_shape_lies_on_a_circle(tmp_path):
    m, h = _bending_history(N=100, steps=3)
    path = tmp_path / "shapes.csv"
    mi.emit_results(h, m, "csv_shapes", str(path))
    rows = list(csv.DictReader(path.open()))
    last = [r for r in rows if int(r["step"]) == h[-1].step]
    pts = np.array([[float(r["x"]), float(r["z"])] for r in last])
    assert len(pts) == 101
    R = 1.0 / (2 * math.pi)
    # circle centre sits one radius from the clamped end, normal to the axis
    centre = np.array([0.0, -R]) if pts[len(pts) // 2][1] < 0 else np.array([0.0, R])
    dev = np.abs(np.linalg.norm(pts - centre, axis=1) - R)
    assert dev.max() < 1e-3
    assert float(last[0]["N_mid"] or 0.0) == 0.0


def test_midspan_radius_of_circle_points():
    R = 2.5
    t = np.linspace(0, 1, 11)
    X, Z = R * np.cos(t), R * np.sin(t)
    assert mi.midspan_radius(X, Z) == pytest.approx(R, rel=1e-12)
    assert mi.circumradius((0, 0), (1, 0), (2, 0)) == math.inf
    with pytest.raises(ValueError):
        mi.midspan_radius(X[:4], Z[:4])


# command line

def test_cli_generate_run_and_sweep(tmp_path, capsys):
    model = tmp_path / "m.json"
    assert cli.main(["generate", "cantilever_moment", "N=20", "steps=2", "-o", str(model)]) == 0
    assert mi.parse_model(model.read_text()).elements[0].N == 20
    out = tmp_path / "out"
    assert cli.main(["run", str(model), "--out", str(out)]) == 0
    assert {p.name for p in out.iterdir()} == {"history.csv", "shapes.csv", "eigen.csv"}
    assert cli.main(["sweep", str(model), "--param", "elements.*.N=10,20",
                     "--out", str(tmp_path / "sw")]) == 0
    assert sorted(p.name for p in (tmp_path / "sw").iterdir()) == ["elements.*.N=10",
                                                                   "elements.*.N=20"]
    assert "converged" in capsys.readouterr().out


def test_cli_generate_to_stdout(capsys):
    assert cli.main(["generate", "periodic_cell", "mode=\"compression\"", "steps=3"]) == 0
    doc = json.loads(capsys.readouterr().out)
    assert doc["meta"]["mode"] == "compression"


def test_cli_input_errors_exit_one(tmp_path):
    bad = tmp_path / "bad.json"
    bad.write_text('{"nodes": []}')
    assert cli.main(["run", str(bad)]) == 1
    assert cli.main(["run", str(tmp_path / "missing.json")]) == 1
    assert cli.main(["generate", "williams_toggle"]) == 1
    assert cli.main(["generate", "honeycomb", "n=2"]) == 1


def test_cli_nonconvergence_exits_two(tmp_path):
    doc = json.loads(_text(MINIMAL))
    doc["loads"][0]["value"] = 50.0
    doc["solver"] = {"max_iter": 2, "steps": 1}
    path = tmp_path / "hard.json"
    path.write_text(json.dumps(doc))
    assert cli.main(["run", str(path)]) == 2
