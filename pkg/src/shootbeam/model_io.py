"""Model files, benchmark generators, lattice post-processing and CSV output."""

import csv
import io
import json
import math
from dataclasses import dataclass, field

import jsonschema
import numpy as np

from . import analytic
from .element import SectionProperties, ShootingConfig, integrate
from .errors import ModelError
from .solver import (Constraint, DofMap, ElementSpec, Model, NodalLoad, SolverConfig,
                     key_label)
from .transform import _alpha_ab

SQRT3 = math.sqrt(3.0)

_NUM = {"type": "number"}
_DOF = {"enum": ["u", "w", "phi"]}

MODEL_SCHEMA = {
    "type": "object",
    "additionalProperties": False,
    "required": ["nodes", "elements"],
    "properties": {
        "nodes": {"type": "array", "minItems": 2,
                  "items": {"type": "array", "items": _NUM, "minItems": 2, "maxItems": 2}},
        "elements": {"type": "array", "minItems": 1, "items": {
            "type": "object", "additionalProperties": False,
            "required": ["a", "b", "EA", "EI"],
            "properties": {"a": {"type": "integer", "minimum": 0},
                           "b": {"type": "integer", "minimum": 0},
                           "EA": {"type": "number", "exclusiveMinimum": 0},
                           "EI": {"type": "number", "exclusiveMinimum": 0},
                           "N": {"type": "integer", "minimum": 1}}}},
        "supports": {"type": "array", "items": {
            "type": "object", "additionalProperties": False, "required": ["node", "dofs"],
            "properties": {"node": {"type": "integer", "minimum": 0},
                           "dofs": {"type": "array", "items": _DOF, "minItems": 1},
                           "kind": {"enum": ["fixed"]}}}},
        "prescribed": {"type": "array", "items": {
            "type": "object", "additionalProperties": False,
            "required": ["node", "dof", "history"],
            "properties": {"node": {"type": "integer", "minimum": 0}, "dof": _DOF,
                           "history": {"type": "array", "items": _NUM}}}},
        "loads": {"type": "array", "items": {
            "type": "object", "additionalProperties": False,
            "required": ["node", "dof", "value"],
            "properties": {"node": {"type": "integer", "minimum": 0}, "dof": _DOF,
                           "value": _NUM}}},
        "hinges": {"type": "array", "items": {
            "type": "object", "additionalProperties": False, "required": ["element", "end"],
            "properties": {"element": {"type": "integer", "minimum": 0},
                           "end": {"enum": ["a", "b"]}}}},
        "solver": {
            "type": "object", "additionalProperties": False,
            "properties": {
                "tol": {"type": "number", "exclusiveMinimum": 0},
                "max_iter": {"type": "integer", "minimum": 1},
                "steps": {"type": "integer", "minimum": 0},
                "control": {"enum": ["load", "displacement"]},
                "eigen_check": {"type": "boolean"},
                "load_factors": {"type": "array", "items": _NUM},
                "element_tol": {"type": "number", "exclusiveMinimum": 0},
                "element_max_iter": {"type": "integer", "minimum": 1},
                "perturbation": {
                    "type": "object", "additionalProperties": False,
                    "required": ["node", "moment"],
                    "properties": {"node": {"type": "integer", "minimum": 0},
                                   "moment": _NUM}}}},
        "meta": {"type": "object"},
    },
}

DEFAULT_N = 20


def _json_path(err):
    path = "$"
    for p in err.absolute_path:
        path += f"[{p}]" if isinstance(p, int) else f".{p}"
    return path


def validate_document(doc):
    """Schema check with the offending JSON path in the message."""
    try:
        jsonschema.validate(doc, MODEL_SCHEMA)
    except jsonschema.ValidationError as err:
        raise ModelError(f"{_json_path(err)}: {err.message}") from None


def model_from_dict(doc):
    validate_document(doc)
    elements = [ElementSpec(e["a"], e["b"], SectionProperties(float(e["EA"]), float(e["EI"])),
                            int(e.get("N", DEFAULT_N))) for e in doc["elements"]]
    solver = doc.get("solver", {})
    n_steps = int(solver.get("steps", 1))
    constraints = []
    for s in doc.get("supports", []):
        for d in s["dofs"]:
            constraints.append(Constraint(s["node"], d, "fixed"))
    for p in doc.get("prescribed", []):
        constraints.append(Constraint(p["node"], p["dof"], "prescribed",
                                      tuple(float(v) for v in p["history"])))
    loads = [NodalLoad(l["node"], l["dof"], float(l["value"])) for l in doc.get("loads", [])]
    hinges = {(h["element"], h["end"]) for h in doc.get("hinges", [])}
    pert = solver.get("perturbation")
    shooting = ShootingConfig(tol=float(solver.get("element_tol", 1e-12)),
                              max_iter=int(solver.get("element_max_iter", 50)))
    cfg = SolverConfig(tol=float(solver.get("tol", 1e-9)),
                       max_iter=int(solver.get("max_iter", 30)),
                       n_steps=n_steps,
                       control=solver.get("control", "load"),
                       eigen_check=bool(solver.get("eigen_check", False)),
                       perturbation_moment=float(pert["moment"]) if pert else 0.0,
                       perturbation_node=int(pert["node"]) if pert else None,
                       shooting=shooting)
    if pert and not 0 <= pert["node"] < len(doc["nodes"]):
        raise ModelError(f"$.solver.perturbation.node: unknown node {pert['node']}")
    lf = solver.get("load_factors")
    model = Model(nodes=[tuple(n) for n in doc["nodes"]], elements=elements,
                  constraints=constraints, loads=loads, hinges=hinges, n_steps=n_steps,
                  load_factors=[float(v) for v in lf] if lf is not None else None,
                  config=cfg, meta=dict(doc.get("meta", {})))
    DofMap(model)
    return model


def parse_model(text):
    """Parse and validate a JSON model document."""
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as err:
        raise ModelError(f"invalid JSON at line {err.lineno} column {err.colno}: {err.msg}") from None
    return model_from_dict(doc)


def model_to_dict(model):
    """Inverse of :func:`model_from_dict`."""
    doc = {
        "nodes": [[x, z] for x, z in model.nodes],
        "elements": [{"a": e.a, "b": e.b, "EA": e.sec.EA, "EI": e.sec.EI, "N": e.N}
                     for e in model.elements],
    }
    fixed = {}
    for c in model.constraints:
        if c.kind == "fixed":
            fixed.setdefault(c.node, []).append(c.dof)
    if fixed:
        doc["supports"] = [{"node": n, "dofs": d, "kind": "fixed"} for n, d in fixed.items()]
    pres = [{"node": c.node, "dof": c.dof, "history": list(c.history)}
            for c in model.constraints if c.kind == "prescribed"]
    if pres:
        doc["prescribed"] = pres
    if model.loads:
        doc["loads"] = [{"node": l.node, "dof": l.dof, "value": l.value} for l in model.loads]
    if model.hinges:
        doc["hinges"] = [{"element": e, "end": end} for e, end in sorted(model.hinges)]
    cfg = model.config or SolverConfig()
    solver = {"tol": cfg.tol, "max_iter": cfg.max_iter, "steps": model.n_steps,
              "control": cfg.control, "eigen_check": cfg.eigen_check,
              "element_tol": cfg.shooting.tol, "element_max_iter": cfg.shooting.max_iter}
    if model.load_factors is not None:
        solver["load_factors"] = list(model.load_factors)
    if cfg.perturbation_moment and cfg.perturbation_node is not None:
        solver["perturbation"] = {"node": cfg.perturbation_node, "moment": cfg.perturbation_moment}
    doc["solver"] = solver
    if model.meta:
        doc["meta"] = model.meta
    return doc


def dumps(doc):
    return json.dumps(doc, indent=1, sort_keys=False) + "\n"


def _linspace_history(total, steps):
    return [total * (j + 1) / steps for j in range(steps)]


# benchmark generators; all return plain JSON-ready dicts

def gen_cantilever_moment(L=1.0, EI=1.0, EA=1e4, N=100, steps=6):
    """Cantilever clamped at the origin and bent into a full circle by an end moment."""
    if steps < 1:
        raise ValueError("steps must be >= 1")
    return {
        "nodes": [[0.0, 0.0], [L, 0.0]],
        "elements": [{"a": 0, "b": 1, "EA": EA, "EI": EI, "N": N}],
        "supports": [{"node": 0, "dofs": ["u", "w", "phi"], "kind": "fixed"}],
        "loads": [{"node": 1, "dof": "phi", "value": 2.0 * math.pi * EI / L}],
        "solver": {"steps": steps, "tol": 1e-9, "max_iter": 40},
        "meta": {"benchmark": "cantilever_moment", "L": L, "EI": EI, "EA": EA,
                 "track": ["u1", "w1", "phi1"]},
    }


def gen_williams_toggle(psi, L=12.94, EA=1.885e6, EI=9.27e3, N=40, w_max=1.0, steps=50):
    """Half toggle: clamped at node 0, node 1 slides vertically without rotating."""
    if psi < 0:
        raise ValueError("psi must be non-negative")
    return {
        "nodes": [[0.0, 0.0], [L * math.cos(psi), -L * math.sin(psi)]],
        "elements": [{"a": 0, "b": 1, "EA": EA, "EI": EI, "N": N}],
        "supports": [{"node": 0, "dofs": ["u", "w", "phi"], "kind": "fixed"},
                     {"node": 1, "dofs": ["u", "phi"], "kind": "fixed"}],
        "prescribed": [{"node": 1, "dof": "w", "history": _linspace_history(w_max, steps)}],
        "solver": {"steps": steps, "control": "displacement", "tol": 1e-9},
        "meta": {"benchmark": "williams_toggle", "psi": psi, "track": ["w1"],
                 "force": "R_w1"},
    }


def _square_quarter(L, EA, EI, N, P, steps):
    # node 0: mid-point of a vertical side, node 1: corner, node 2: loaded mid-point
    return {
        "nodes": [[L, L], [L, 0.0], [0.0, 0.0]],
        "elements": [{"a": 0, "b": 1, "EA": EA, "EI": EI, "N": N},
                     {"a": 1, "b": 2, "EA": EA, "EI": EI, "N": N}],
        "supports": [{"node": 0, "dofs": ["w", "phi"], "kind": "fixed"},
                     {"node": 2, "dofs": ["u", "phi"], "kind": "fixed"}],
        "loads": [{"node": 2, "dof": "w", "value": P}],
        "solver": {"steps": steps, "tol": 1e-9, "max_iter": 60},
        "meta": {"benchmark": "square_frame", "track": ["u0", "u1", "w1", "phi1", "w2"]},
    }


def _diamond_quarter(L, EA, EI, N, P, steps):
    # node 0: side vertex on the horizontal axis, node 1: hinged loaded vertex
    h = L / math.sqrt(2.0)
    return {
        "nodes": [[h, h], [0.0, 0.0]],
        "elements": [{"a": 0, "b": 1, "EA": EA, "EI": EI, "N": N}],
        "supports": [{"node": 0, "dofs": ["w", "phi"], "kind": "fixed"},
                     {"node": 1, "dofs": ["u"], "kind": "fixed"}],
        "hinges": [{"element": 0, "end": "b"}],
        "loads": [{"node": 1, "dof": "w", "value": P}],
        "solver": {"steps": steps, "tol": 1e-9, "max_iter": 60},
        "meta": {"benchmark": "diamond_frame", "track": ["u0", "w1"]},
    }


def _buckling_cantilever(L, EA, EI, N, P, steps, perturbation):
    doc = {
        "nodes": [[0.0, 0.0], [L, 0.0]],
        "elements": [{"a": 0, "b": 1, "EA": EA, "EI": EI, "N": N}],
        "supports": [{"node": 1, "dofs": ["u", "w", "phi"], "kind": "fixed"}],
        "loads": [{"node": 0, "dof": "u", "value": P}],
        "solver": {"steps": steps, "tol": 1e-9, "max_iter": 60, "eigen_check": True},
        "meta": {"benchmark": "buckling_cantilever", "track": ["u0", "w0", "phi0"]},
    }
    if perturbation:
        doc["solver"]["perturbation"] = {"node": 0, "moment": perturbation}
    return doc


def gen_frames(EA=1e4, N=30, P=4.0, steps=16, L=1.0, EI=1.0, mode="compression",
               buckling_P=6.0, buckling_steps=120, buckling_N=100, perturbation=0.0):
    """Quarter models of the square and diamond frames and the compressed cantilever.

    ``mode='tension'`` reverses the frame loads.
    """
    if mode not in ("compression", "tension"):
        raise ValueError(f"unknown mode {mode!r}")
    sgn = 1.0 if mode == "compression" else -1.0
    return {
        "square_quarter": _square_quarter(L, EA, EI, N, sgn * P, steps),
        "diamond_quarter": _diamond_quarter(L, EA, EI, N, sgn * P, steps),
        "buckling_cantilever": _buckling_cantilever(L, EA, EI, buckling_N, buckling_P,
                                                    buckling_steps, perturbation),
    }


@dataclass(frozen=True)
class HoneycombSpec:
    n: int = 3
    a: float = 1.0
    EA: float = 1e4
    EI: float = 1.0
    t: float = 1.0
    mode: str = "tension"
    add_boundary_layer: bool = False
    strain_max: float = 0.3
    steps: int = 30
    N: int = 10

    def __post_init__(self):
        if self.n < 1 or self.n % 2 == 0:
            raise ValueError(f"lattice size n must be a positive odd integer, got {self.n}")
        if not self.a > 0:
            raise ValueError("strut length a must be positive")
        if self.mode not in ("tension", "compression"):
            raise ValueError(f"unknown mode {self.mode!r}")

    @property
    def width(self):
        return self.n * self.a * SQRT3

    @property
    def height(self):
        return (3 * self.n + 1) * self.a / 2.0

    @property
    def sample_height(self):
        return self.height + (self.a if self.add_boundary_layer else 0.0)


def honeycomb_geometry(n, a):
    """Nodes (sorted by z then x) and strut pairs of the n x n pattern."""
    h = SQRT3 * a / 2.0
    width = n * SQRT3 * a
    eps = 1e-9 * a
    keys = {}
    coords = []

    def node(x, z):
        key = (round(x / a * 1e6), round(z / a * 1e6))
        if key not in keys:
            keys[key] = len(coords)
            coords.append((x, z))
        return keys[key]

    edges = set()
    for layer in range(n):
        cz = a + 1.5 * a * layer
        if layer % 2 == 0:
            centers = [h + j * SQRT3 * a for j in range(n)]
        else:
            centers = [j * SQRT3 * a for j in range(n + 1)]
        for cx in centers:
            verts = [(cx, cz - a), (cx + h, cz - a / 2), (cx + h, cz + a / 2),
                     (cx, cz + a), (cx - h, cz + a / 2), (cx - h, cz - a / 2)]
            for p, q in zip(verts, verts[1:] + verts[:1]):
                if all(-eps <= v[0] <= width + eps for v in (p, q)):
                    i, j = node(*p), node(*q)
                    edges.add((min(i, j), max(i, j)))
    order = sorted(range(len(coords)), key=lambda i: (round(coords[i][1] / a * 1e6),
                                                      round(coords[i][0] / a * 1e6)))
    new = {old: k for k, old in enumerate(order)}
    nodes = [coords[i] for i in order]
    pairs = sorted((min(new[i], new[j]), max(new[i], new[j])) for i, j in edges)
    return nodes, pairs


def honeycomb_counts(n):
    """Closed-form node and strut counts of the stacking rule."""
    n_nodes = (n + 1) * (2 * n + 1)
    vertical = sum(n + 1 if layer % 2 == 0 else n for layer in range(n))
    return n_nodes, 2 * n * (n + 1) + vertical


def gen_honeycomb(spec):
    """Finite lattice loaded by prescribed vertical displacement of its bottom nodes."""
    a = spec.a
    nodes, pairs = honeycomb_geometry(spec.n, a)
    H = spec.height
    top = [i for i, (x, z) in enumerate(nodes) if abs(z) < 1e-9 * a]
    bottom = [i for i, (x, z) in enumerate(nodes) if abs(z - H) < 1e-9 * a]
    elements = [{"a": i, "b": j, "EA": spec.EA, "EI": spec.EI, "N": spec.N} for i, j in pairs]
    loaded = bottom
    if spec.add_boundary_layer:
        loaded = []
        for i in bottom:
            x, _ = nodes[i]
            nodes.append((x, H + a))
            loaded.append(len(nodes) - 1)
            elements.append({"a": i, "b": len(nodes) - 1, "EA": spec.EA, "EI": spec.EI, "N": spec.N})
    sign = 1.0 if spec.mode == "tension" else -1.0
    history = _linspace_history(sign * spec.strain_max * spec.sample_height, spec.steps)
    supports = [{"node": i, "dofs": ["w"], "kind": "fixed"} for i in top]
    supports[0]["dofs"] = ["u", "w"]
    prescribed = [{"node": i, "dof": "w", "history": history} for i in loaded]
    if spec.n == 1:
        # a single top support leaves rotation about it free
        prescribed.append({"node": loaded[0], "dof": "u", "history": [0.0] * spec.steps})
    return {
        "nodes": [[x, z] for x, z in nodes],
        "elements": elements,
        "supports": supports,
        "prescribed": prescribed,
        "solver": {"steps": spec.steps, "control": "displacement", "tol": 1e-9, "max_iter": 40},
        "meta": {"benchmark": "honeycomb", "n": spec.n, "a": a, "t": spec.t, "EA": spec.EA,
                 "EI": spec.EI, "mode": spec.mode, "add_boundary_layer": spec.add_boundary_layer,
                 "loaded_nodes": loaded},
    }


@dataclass
class LatticeResult:
    sigma: list = field(default_factory=list)
    eps: list = field(default_factory=list)
    eps_corrected: list = field(default_factory=list)
    reactions: list = field(default_factory=list)


def strain_correction(eps, sigma, n, a, t, EA, EI):
    """Strain change from an added layer of vertical struts."""
    return (-2.0 * eps / (3.0 * (n + 1))
            + 2.0 / (SQRT3 * (n + 1)) * (EI / (EA * a * a)) * (sigma * t * a ** 3 / EI))


def honeycomb_postprocess(history, spec):
    """Average stress and strain of a finite-lattice run (zero state first).

    Strain is referred to the sample height; the added-layer estimate is
    applied only to runs without that layer.
    """
    dm = history.dofmap
    model_loaded = None
    out = LatticeResult([0.0], [0.0], [0.0], [[]])
    for res in history:
        if not res.converged:
            break
        if model_loaded is None:
            model_loaded = [k for k in res.reactions if k[2] == "w" and
                            abs(res.value(dm, k)) > 0.0]
        R = [res.reactions[k] for k in model_loaded]
        wbar = float(np.mean([res.value(dm, k) for k in model_loaded]))
        sigma = sum(R) / (spec.t * spec.width)
        eps = wbar / spec.sample_height
        corr = 0.0 if spec.add_boundary_layer else strain_correction(
            eps, sigma, spec.n, spec.a, spec.t, spec.EA, spec.EI)
        out.sigma.append(sigma)
        out.eps.append(eps)
        out.eps_corrected.append(eps + corr)
        out.reactions.append(R)
    return out


def gen_periodic_cell(a=1.0, EA=1e4, EI=1.0, mode="tension", strain_max=0.2, steps=40, N=40):
    """One inclined strut of the periodic cell: clamped at node 0, node 1 slides
    horizontally with prescribed vertical displacement and no rotation."""
    if mode not in ("tension", "compression"):
        raise ValueError(f"unknown mode {mode!r}")
    sign = 1.0 if mode == "tension" else -1.0
    # inextensible estimate of the strut offset for the requested strain
    delta = sign * strain_max * 1.5 * a
    return {
        "nodes": [[0.0, 0.0], [a * SQRT3 / 2.0, a / 2.0]],
        "elements": [{"a": 0, "b": 1, "EA": EA, "EI": EI, "N": N}],
        "supports": [{"node": 0, "dofs": ["u", "w", "phi"], "kind": "fixed"},
                     {"node": 1, "dofs": ["phi"], "kind": "fixed"}],
        "prescribed": [{"node": 1, "dof": "w", "history": _linspace_history(delta, steps)}],
        "solver": {"steps": steps, "control": "displacement", "tol": 1e-9, "max_iter": 40},
        "meta": {"benchmark": "periodic_cell", "a": a, "EA": EA, "EI": EI, "mode": mode,
                 "track": ["u1", "w1"], "force": "R_w1"},
    }


def periodic_cell_numeric_curve(history, a, EA, t=1.0):
    """(eps, sigma) of the periodic lattice from a strut run, vertical struts added in closed form."""
    dm = history.dofmap
    key = ("n", 1, "w")
    eps, sig = [0.0], [0.0]
    for res in history:
        if not res.converged:
            break
        delta = res.value(dm, key)
        F = res.reactions[key]
        eps.append((2.0 * delta + 4.0 * F * a / EA) / (3.0 * a))
        sig.append(2.0 * F / (t * a * SQRT3))
    return np.array(eps), np.array(sig)


def periodic_cell_analytic_curve(a, EI, t, mode, phi_range):
    """Inextensible (eps, sigma) samples parametrized by the end rotation of the half strut."""
    if mode == "tension":
        alpha, sign = 2.0 * math.pi / 3.0, 1.0
    elif mode == "compression":
        alpha, sign = math.pi / 3.0, -1.0
    else:
        raise ValueError(f"unknown mode {mode!r}")
    eps, sig = [], []
    for phi in phi_range:
        if phi == 0.0:
            eps.append(0.0)
            sig.append(0.0)
            continue
        sol = analytic.cantilever_solution(phi, alpha, a / 2.0, EI)
        eps.append(sign * 4.0 * sol.u_F / (3.0 * a))
        sig.append(sign * 2.0 * sol.F / (t * a * SQRT3))
    return np.array(eps), np.array(sig)


# output

def _fmt(v):
    if v is None or (isinstance(v, float) and math.isnan(v)):
        return ""
    if isinstance(v, (int, np.integer)) and not isinstance(v, bool):
        return str(int(v))
    return format(float(v), ".17g")


def _write_rows(stream, header, rows):
    w = csv.writer(stream, lineterminator="\n")
    w.writerow(header)
    for r in rows:
        w.writerow([_fmt(v) for v in r])


def csv_history(history, dofmap):
    keys = dofmap.keys
    fixed = dofmap.fixed_keys
    header = ["step", "lambda", "iterations"] + [key_label(k) for k in keys] + \
             ["R_" + key_label(k) for k in fixed]
    rows = []
    for res in history:
        if not res.converged:
            continue
        rows.append([res.step, res.lam, res.iterations] + [float(v) for v in res.state]
                    + [res.reactions[k] for k in fixed])
    buf = io.StringIO()
    _write_rows(buf, header, rows)
    return buf.getvalue()


def element_shape(model, dofmap, res, e):
    """Global grid-point positions, rotations and internal forces of one element."""
    el = model.elements[e]
    geom = model.geometry(e)
    st = res.elements[e]
    _, grid = integrate(st.forces, el.sec, geom.L, el.N)
    idx = dofmap.element_index[e]
    ua, wa, pa = (res.state[i] for i in idx[:3])
    xa, za = model.nodes[el.a]
    c, s = _alpha_ab(pa, geom)
    xl = grid.x + grid.u
    X = xa + ua + xl * c - grid.w * s
    Z = za + wa + xl * s + grid.w * c
    return X, Z, pa + grid.phi, grid.M, grid.N_mid


def csv_shapes(history, model, dofmap):
    header = ["step", "element", "i", "x", "z", "phi", "M", "N_mid"]
    rows = []
    for res in history:
        if not res.converged:
            continue
        for e in range(len(model.elements)):
            X, Z, phi, M, Nm = element_shape(model, dofmap, res, e)
            for i in range(len(X)):
                rows.append([res.step, e, i, X[i], Z[i], phi[i], M[i],
                             Nm[i - 1] if i > 0 else None])
    buf = io.StringIO()
    _write_rows(buf, header, rows)
    return buf.getvalue()


def csv_eigen(history):
    rows = [[r.step, r.lam, r.min_eigenvalue] for r in history if r.converged]
    buf = io.StringIO()
    _write_rows(buf, ["step", "lambda", "min_eigenvalue"], rows)
    return buf.getvalue()


def emit_results(history, model, fmt, path=None):
    """Render one CSV format; write it to ``path`` when given and return the text."""
    dofmap = history.dofmap if history is not None and hasattr(history, "dofmap") else DofMap(model)
    if fmt == "csv_history":
        text = csv_history(history, dofmap)
    elif fmt == "csv_shapes":
        text = csv_shapes(history, model, dofmap)
    elif fmt == "csv_eigen":
        text = csv_eigen(history)
    else:
        raise ValueError(f"unknown format {fmt!r}")
    if path is not None:
        with open(path, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    return text


def circumradius(p0, p1, p2):
    """Radius of the circle through three points."""
    a = math.dist(p1, p2)
    b = math.dist(p0, p2)
    c = math.dist(p0, p1)
    cross = abs((p1[0] - p0[0]) * (p2[1] - p0[1]) - (p1[1] - p0[1]) * (p2[0] - p0[0]))
    if cross == 0.0:
        return math.inf
    return a * b * c / (2.0 * cross)


def midspan_radius(X, Z):
    """Curvature radius at the central grid node from its two neighbours."""
    n = len(X) - 1
    if n < 2 or n % 2:
        raise ValueError("need an even number of segments")
    m = n // 2
    return circumradius((X[m - 1], Z[m - 1]), (X[m], Z[m]), (X[m + 1], Z[m + 1]))
