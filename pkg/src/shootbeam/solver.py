"""Global assembly, incremental Newton-Raphson and stability monitoring.

Degrees of freedom are keyed ``("n", node, dof)`` for joint displacements
and rotations and ``("h", element, end)`` for the independent end rotation
of a hinged element end. A joint rotation that no element uses is dropped.
"""

import math
from dataclasses import dataclass, field, replace

import numpy as np

from .element import (EndForces, NonConvergence, SectionProperties, ShootingConfig,
                      initial_guess, jacobian, solve_end_forces)
from .errors import ModelError, SingularJacobian
from .transform import (ElementGeometry, GlobalNodeState, global_forces, local_target,
                        tangent_stiffness)

NODE_DOFS = ("u", "w", "phi")

JACOBI_LIMIT = 200


@dataclass(frozen=True)
class ElementSpec:
    a: int
    b: int
    sec: SectionProperties
    N: int = 20


@dataclass(frozen=True)
class Constraint:
    """Support condition. ``history`` holds one target value per step for
    prescribed DOFs and is empty for fixed ones."""

    node: int
    dof: str
    kind: str = "fixed"
    history: tuple = ()


@dataclass(frozen=True)
class NodalLoad:
    node: int
    dof: str
    value: float


@dataclass
class Model:
    nodes: list
    elements: list
    constraints: list = field(default_factory=list)
    loads: list = field(default_factory=list)
    hinges: set = field(default_factory=set)
    n_steps: int = 1
    load_factors: list = None
    config: object = None
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        self.nodes = [(float(x), float(z)) for x, z in self.nodes]
        self.hinges = {(int(e), str(end)) for e, end in self.hinges}
        nn = len(self.nodes)
        if not self.elements:
            raise ModelError("model has no elements")
        for i, el in enumerate(self.elements):
            for n in (el.a, el.b):
                if not 0 <= n < nn:
                    raise ModelError(f"element {i} references unknown node {n}")
            if self.nodes[el.a] == self.nodes[el.b]:
                raise ModelError(f"element {i} has coincident end points")
            if el.N < 1:
                raise ModelError(f"element {i} needs at least one segment")
        for e, end in self.hinges:
            if not 0 <= e < len(self.elements) or end not in ("a", "b"):
                raise ModelError(f"invalid hinge ({e}, {end})")
        if self.n_steps < 0:
            raise ModelError("n_steps must be non-negative")
        if self.load_factors is not None and len(self.load_factors) != self.n_steps:
            raise ModelError("load_factors must have one entry per step")
        seen = set()
        for c in self.constraints:
            self._check_dof(c.node, c.dof, "constraint")
            if (c.node, c.dof) in seen:
                raise ModelError(f"duplicate constraint on node {c.node} dof {c.dof}")
            seen.add((c.node, c.dof))
            if c.kind == "fixed":
                if c.history:
                    raise ModelError(f"fixed constraint on node {c.node} carries a history")
            elif c.kind == "prescribed":
                if len(c.history) != self.n_steps:
                    raise ModelError(
                        f"prescribed history on node {c.node} dof {c.dof} has "
                        f"{len(c.history)} values for {self.n_steps} steps")
            else:
                raise ModelError(f"unknown constraint kind {c.kind!r} on node {c.node}")
        for ld in self.loads:
            self._check_dof(ld.node, ld.dof, "load")

    def _check_dof(self, node, dof, what):
        if not 0 <= node < len(self.nodes):
            raise ModelError(f"{what} references unknown node {node}")
        if dof not in NODE_DOFS:
            raise ModelError(f"{what} on node {node} has unknown dof {dof!r}")

    def element_keys(self, e):
        el = self.elements[e]
        ra = ("h", e, "a") if (e, "a") in self.hinges else ("n", el.a, "phi")
        rb = ("h", e, "b") if (e, "b") in self.hinges else ("n", el.b, "phi")
        return [("n", el.a, "u"), ("n", el.a, "w"), ra, ("n", el.b, "u"), ("n", el.b, "w"), rb]

    def geometry(self, e):
        el = self.elements[e]
        (xa, za), (xb, zb) = self.nodes[el.a], self.nodes[el.b]
        return ElementGeometry.from_coords(xa, za, xb, zb)

    def schedule(self):
        """Load steps built from the model's factors and prescribed histories."""
        steps = []
        for j in range(self.n_steps):
            lam = self.load_factors[j] if self.load_factors is not None else (j + 1) / self.n_steps
            pres = {("n", c.node, c.dof): float(c.history[j])
                    for c in self.constraints if c.kind == "prescribed"}
            steps.append(LoadStep(lam, pres))
        return steps


@dataclass(frozen=True)
class LoadStep:
    lam: float
    prescribed: dict = field(default_factory=dict)


class DofMap:
    """Dense numbering of all DOFs, split into free and constrained sets."""

    def __init__(self, model):
        used = set()
        for e in range(len(model.elements)):
            used.update(model.element_keys(e))
        keys = [("n", n, d) for n in range(len(model.nodes)) for d in NODE_DOFS
                if ("n", n, d) in used]
        keys += sorted(k for k in used if k[0] == "h")
        self.keys = keys
        self.index = {k: i for i, k in enumerate(keys)}
        constrained = []
        for c in model.constraints:
            k = ("n", c.node, c.dof)
            if k not in self.index:
                raise ModelError(f"constraint on node {c.node} dof {c.dof} targets no element DOF")
            constrained.append(k)
        for ld in model.loads:
            if ("n", ld.node, ld.dof) not in self.index:
                raise ModelError(f"load on node {ld.node} dof {ld.dof} targets no element DOF")
        cset = set(constrained)
        self.free_keys = [k for k in keys if k not in cset]
        self.fixed_keys = [k for k in keys if k in cset]
        self.free = np.array([self.index[k] for k in self.free_keys], dtype=int)
        self.fixed = np.array([self.index[k] for k in self.fixed_keys], dtype=int)
        self.free_index = {k: i for i, k in enumerate(self.free_keys)}
        self.element_index = [np.array([self.index[k] for k in model.element_keys(e)])
                              for e in range(len(model.elements))]
        self.is_moment = np.array([k[0] == "h" or k[2] == "phi" for k in keys])

    @property
    def n_free(self):
        return len(self.free_keys)

    def load_vector(self, loads):
        f = np.zeros(len(self.keys))
        for ld in loads:
            f[self.index[("n", ld.node, ld.dof)]] += ld.value
        return f


def key_label(key):
    """Column label for a DOF key, e.g. ``w3`` or ``phi_e0b``."""
    if key[0] == "n":
        return f"{key[2]}{key[1]}"
    return f"phi_e{key[1]}{key[2]}"


@dataclass(frozen=True)
class SolverConfig:
    tol: float = 1e-9
    max_iter: int = 30
    n_steps: int = 1
    control: str = "load"
    eigen_check: bool = False
    perturbation_moment: float = 0.0
    perturbation_node: int = None
    shooting: ShootingConfig = ShootingConfig()
    max_cutbacks: int = 8

    def __post_init__(self):
        if not self.tol > 0 or self.max_iter < 1 or self.max_cutbacks < 0:
            raise ValueError(f"invalid solver configuration {self}")
        if self.control not in ("load", "displacement"):
            raise ValueError(f"unknown control {self.control!r}")


@dataclass
class ElementState:
    forces: EndForces
    local: object
    global_forces: object
    Ginv: np.ndarray = None


@dataclass
class StepResult:
    step: int
    lam: float
    iterations: int
    converged: bool
    state: np.ndarray
    reactions: dict
    residuals: list
    elements: list
    min_eigenvalue: float = None

    def value(self, dofmap, key):
        return float(self.state[dofmap.index[key]])


@dataclass
class Assembly:
    f_int: np.ndarray
    K: np.ndarray
    elements: list


def _node_state(U, idx):
    return GlobalNodeState(U[idx[0]], U[idx[1]], U[idx[2]]), GlobalNodeState(U[idx[3]], U[idx[4]], U[idx[5]])


def _starts(target, warm):
    # linear predictor from the last converged element state, then its forces
    if isinstance(warm, ElementState):
        if warm.Ginv is not None:
            dt = target.as_array() - warm.local.as_array()
            yield EndForces.from_array(warm.forces.as_array() + warm.Ginv @ dt)
        yield warm.forces
    else:
        yield warm


def _element_solve(target, warm, sec, L, cfg):
    for f0 in _starts(target, warm):
        try:
            return solve_end_forces(target, f0, cfg, sec, L, fallback=False)
        except (NonConvergence, SingularJacobian):
            pass
    # the continuation stage starts from zero, so it runs at most once
    return solve_end_forces(target, initial_guess(target, sec, L, cfg.N), cfg, sec, L)


def assemble(model, dofmap, U, warm, shooting=ShootingConfig()):
    """Internal forces and tangent over all DOFs at the global state U.

    ``warm`` holds one EndForces or ElementState per element (the Newton
    start). The returned Assembly carries the converged element states.
    """
    n = len(dofmap.keys)
    f_int = np.zeros(n)
    K = np.zeros((n, n))
    states = []
    for e, el in enumerate(model.elements):
        idx = dofmap.element_index[e]
        geom = model.geometry(e)
        na, nb = _node_state(U, idx)
        target = local_target(na, nb, geom)
        cfg = replace(shooting, N=el.N)
        try:
            res = _element_solve(target, warm[e], el.sec, geom.L, cfg)
        except (NonConvergence, SingularJacobian) as exc:
            it = getattr(exc, "iterations", 0)
            r = getattr(exc, "residual", math.inf)
            raise NonConvergence(it, r, element=e) from exc
        f = res.forces
        gf = global_forces(f, target, na.phi, geom)
        try:
            Ginv = np.linalg.inv(jacobian(f, el.sec, geom.L, el.N))
        except np.linalg.LinAlgError as exc:
            raise SingularJacobian(f"element {e}: {exc}") from exc
        k = tangent_stiffness(f, Ginv, na, nb, geom)
        f_int[idx] += gf.as_array()
        K[np.ix_(idx, idx)] += k
        states.append(ElementState(f, target, gf, Ginv))
    return Assembly(f_int, K, states)


def residual_norm(r, dofmap, model, keys=None):
    """Euclidean norm with forces scaled by EI/L^2 and moments by EI/L."""
    el = model.elements[0]
    L = model.geometry(0).L
    F = el.sec.EI / L ** 2
    mom = dofmap.is_moment[dofmap.free] if keys is None else keys
    scaled = np.where(mom, r / (F * L), r / F)
    return float(np.linalg.norm(scaled))


def _solve_linear(A, b):
    try:
        x = np.linalg.solve(A, b)
    except np.linalg.LinAlgError as exc:
        raise SingularJacobian(f"global tangent is singular: {exc}") from exc
    if not np.all(np.isfinite(x)):
        raise SingularJacobian("global solve produced non-finite values")
    return x


def _advance(model, dofmap, U, asm, delta, dp, cfg):
    """Apply a Newton increment, halving the free part if an element fails."""
    warm = asm.elements
    fr, fx = dofmap.free, dofmap.fixed
    scale = 1.0
    for _ in range(cfg.max_cutbacks + 1):
        trial = U.copy()
        trial[fr] += scale * delta
        if dp is not None:
            trial[fx] += dp[fx]
        try:
            return trial, assemble(model, dofmap, trial, warm, cfg.shooting)
        except (NonConvergence, SingularJacobian) as exc:
            failure = exc
            scale *= 0.5
    raise failure


def solve_step(model, dofmap, U, warm, step, cfg, extra_loads=(), index=0):
    """Newton iteration to equilibrium at load factor ``step.lam``.

    ``extra_loads`` are added without the load factor. Prescribed DOFs
    move to their targets in the first (predictor) solve,
    whose right-hand side carries the -K_fp * dp term. Iterations count
    linear solves; the residual is checked before each solve.

    Returns (StepResult, new state, new warm forces).
    """
    U = np.array(U, dtype=float)
    fr, fx = dofmap.free, dofmap.fixed
    f_ext = step.lam * dofmap.load_vector(model.loads) + dofmap.load_vector(extra_loads)
    dp = np.zeros(len(dofmap.keys))
    for k, v in step.prescribed.items():
        i = dofmap.index[k]
        dp[i] = v - U[i]
    asm = assemble(model, dofmap, U, warm, cfg.shooting)
    history = []
    it = 0
    pending = bool(np.any(dp != 0.0))
    while True:
        r = asm.f_int[fr] - f_ext[fr]
        if pending:
            rhs = -r - asm.K[np.ix_(fr, fx)] @ dp[fx]
        else:
            norm = residual_norm(r, dofmap, model)
            history.append(norm)
            if norm <= cfg.tol:
                break
            if it >= cfg.max_iter or not math.isfinite(norm):
                raise NonConvergence(it, norm, message=f"step {index}: no equilibrium after {it} "
                                                       f"iterations (residual {norm:.3e})")
            rhs = -r
        delta = _solve_linear(asm.K[np.ix_(fr, fr)], rhs) if len(fr) else np.zeros(0)
        it += 1
        U, asm = _advance(model, dofmap, U, asm, delta, dp if pending else None, cfg)
        pending = False
    reactions = {k: float(asm.f_int[i] - f_ext[i]) for k, i in zip(dofmap.fixed_keys, fx)}
    result = StepResult(index, step.lam, it, True, U.copy(), reactions, history, asm.elements)
    if cfg.eigen_check and len(fr):
        result.min_eigenvalue = min_eigenvalue(asm.K[np.ix_(fr, fr)])
    return result, U, list(asm.elements)


def min_eigenvalue(K, threshold=1e-12):
    """Smallest eigenvalue of a symmetric matrix.

    Cyclic Jacobi rotations up to JACOBI_LIMIT unknowns; LAPACK beyond.
    """
    A = np.array(K, dtype=float)
    n = A.shape[0]
    if A.shape != (n, n):
        raise ValueError("matrix must be square")
    if n == 0:
        raise ValueError("empty matrix")
    if n > JACOBI_LIMIT:
        return float(np.linalg.eigvalsh(A)[0])
    A = 0.5 * (A + A.T)
    scale = np.linalg.norm(A)
    if scale == 0.0:
        return 0.0
    for _ in range(100):
        off = math.sqrt(max(0.0, np.sum(A * A) - np.sum(np.diag(A) ** 2)))
        if off <= threshold * scale:
            break
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = A[p, q]
                if abs(apq) <= 1e-300:
                    continue
                theta = (A[q, q] - A[p, p]) / (2.0 * apq)
                t = math.copysign(1.0, theta) / (abs(theta) + math.hypot(theta, 1.0))
                c = 1.0 / math.hypot(t, 1.0)
                s = t * c
                ap, aq = A[:, p].copy(), A[:, q].copy()
                A[:, p] = c * ap - s * aq
                A[:, q] = s * ap + c * aq
                rp, rq = A[p, :].copy(), A[q, :].copy()
                A[p, :] = c * rp - s * rq
                A[q, :] = s * rp + c * rq
    return float(np.min(np.diag(A)))


def initial_warm(model):
    return [EndForces() for _ in model.elements]


def check_stability(model, dofmap, shooting=ShootingConfig()):
    """Raise ModelError if the unloaded tangent on the free DOFs is not positive definite."""
    U = np.zeros(len(dofmap.keys))
    asm = assemble(model, dofmap, U, initial_warm(model), shooting)
    Kff = asm.K[np.ix_(dofmap.free, dofmap.free)]
    if dofmap.n_free == 0:
        return
    lam = min_eigenvalue(Kff)
    if lam <= 1e-10 * np.abs(Kff).max():
        raise ModelError(f"insufficient supports: unloaded tangent has eigenvalue {lam:.3e}")


def perturbed_restart(model, dofmap, U, warm, step, m, node, cfg):
    """Equilibrium with an auxiliary joint moment ``m`` at ``node`` added.

    The result is only a starting point for the next true step; the moment
    is not kept in the loading.
    """
    if m == 0.0:
        return np.array(U, dtype=float), list(warm)
    _, U2, warm2 = solve_step(model, dofmap, U, warm, step, cfg,
                              extra_loads=[NodalLoad(node, "phi", m)])
    return U2, warm2


def run_analysis(model, schedule=None, cfg=None, dofmap=None, U0=None, warm0=None):
    """Solve the load steps in sequence; stop at the first failure.

    Returns the list of StepResult; a failed step is appended with
    ``converged=False`` and its exception available as ``history.error``.
    """
    cfg = cfg or model.config or SolverConfig()
    dofmap = dofmap or DofMap(model)
    if schedule is None:
        schedule = model.schedule()
    U = np.zeros(len(dofmap.keys)) if U0 is None else np.array(U0, dtype=float)
    warm = initial_warm(model) if warm0 is None else list(warm0)
    history = AnalysisHistory(dofmap)
    prev = LoadStep(0.0, {})
    for j, step in enumerate(schedule):
        try:
            if cfg.perturbation_moment and cfg.perturbation_node is not None:
                U, warm = perturbed_restart(model, dofmap, U, warm, prev,
                                            cfg.perturbation_moment, cfg.perturbation_node, cfg)
            res, U, warm = solve_step(model, dofmap, U, warm, step, cfg, index=j)
        except (NonConvergence, SingularJacobian) as exc:
            history.error = exc
            history.append(StepResult(j, step.lam, getattr(exc, "iterations", 0), False,
                                      U.copy(), {}, [], []))
            break
        history.append(res)
        prev = step
    return history


class AnalysisHistory(list):
    """List of StepResult that remembers its DofMap and any terminating error."""

    def __init__(self, dofmap, items=()):
        super().__init__(items)
        self.dofmap = dofmap
        self.error = None

    @property
    def converged(self):
        return self.error is None
