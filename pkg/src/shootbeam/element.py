"""Shooting-method beam element in the co-rotational frame of its left end.

The three first-order equations for rotation and centerline displacements
are integrated with the explicit half-step scheme; the left-end forces that
reproduce prescribed right-end displacements are found by Newton iteration
with the exact derivative of that scheme as Jacobian.
"""

import math
from dataclasses import dataclass

import numpy as np
from numba import njit

from .errors import NonConvergence, SingularJacobian

DIRECTIONS = {"dX": (1.0, 0.0, 0.0), "dZ": (0.0, 1.0, 0.0), "dM": (0.0, 0.0, 1.0)}

DIVERGENCE_LIMIT = 1e6


@dataclass(frozen=True)
class SectionProperties:
    EA: float
    EI: float

    def __post_init__(self):
        if not (self.EA > 0 and self.EI > 0):
            raise ValueError(f"section stiffnesses must be positive, got EA={self.EA}, EI={self.EI}")


@dataclass(frozen=True)
class EndForces:
    """Left-end force components and moment in the co-rotational frame."""

    X: float = 0.0
    Z: float = 0.0
    M: float = 0.0

    def as_array(self):
        return np.array([self.X, self.Z, self.M])

    @classmethod
    def from_array(cls, f):
        return cls(float(f[0]), float(f[1]), float(f[2]))


@dataclass(frozen=True)
class LocalEndDisplacements:
    """Right-end displacements and rotation relative to the co-rotated left end."""

    u: float = 0.0
    w: float = 0.0
    phi: float = 0.0

    def as_array(self):
        return np.array([self.u, self.w, self.phi])

    @classmethod
    def from_array(cls, v):
        return cls(float(v[0]), float(v[1]), float(v[2]))


@dataclass
class IntegrationGrid:
    N: int
    dx: float
    x: np.ndarray
    phi: np.ndarray
    u: np.ndarray
    w: np.ndarray
    M: np.ndarray
    phi_mid: np.ndarray
    N_mid: np.ndarray


@dataclass(frozen=True)
class ShootingConfig:
    tol: float = 1e-12
    max_iter: int = 50
    N: int = 20

    def __post_init__(self):
        if self.tol <= 0 or self.max_iter < 1 or self.N < 1:
            raise ValueError(f"invalid shooting configuration {self}")


@njit(cache=True)
def _march(X, Z, Mab, EA, EI, dx, N):
    half = 0.5 * dx / EI
    out = np.zeros((4, N + 1))
    mid = np.empty((2, N))
    phi = u = w = 0.0
    M = -Mab
    out[3, 0] = M
    for i in range(1, N + 1):
        ph = phi + M * half
        s, c = math.sin(ph), math.cos(ph)
        Nm = -X * c + Z * s
        stretch = 1.0 + Nm / EA
        u += (stretch * c - 1.0) * dx
        w -= stretch * s * dx
        M = -Mab + X * w - Z * (i * dx + u)
        phi = ph + M * half
        mid[0, i - 1] = ph
        mid[1, i - 1] = Nm
        out[0, i] = phi
        out[1, i] = u
        out[2, i] = w
        out[3, i] = M
    return out, mid


def integrate(f, sec, L, N):
    """Run the explicit scheme from zero initial values.

    Returns the right-end displacements ``(u_N, w_N, phi_N)`` and the grid.
    """
    if N < 1:
        raise ValueError("segment count N must be >= 1")
    dx = L / N
    out, mid = _march(float(f.X), float(f.Z), float(f.M), float(sec.EA), float(sec.EI), dx, int(N))
    grid = IntegrationGrid(N=N, dx=dx, x=np.arange(N + 1) * dx, phi=out[0], u=out[1],
                           w=out[2], M=out[3], phi_mid=mid[0], N_mid=mid[1])
    end = LocalEndDisplacements(float(out[1, N]), float(out[2, N]), float(out[0, N]))
    if not all(math.isfinite(v) for v in (end.u, end.w, end.phi)):
        raise FloatingPointError(f"integration produced non-finite end values {end}")
    return end, grid


@njit(cache=True)
def _march_sensitivity(X, Z, EA, EI, dx, x, u, w, pm, nm, D):
    # derivative of the scheme along each column of D (rows dX, dZ, dM)
    half = 0.5 * dx / EI
    k = D.shape[1]
    out = np.empty((3, k))
    for col in range(k):
        dX, dZ, dM = D[0, col], D[1, col], D[2, col]
        dphi = du = dw = 0.0
        for i in range(1, x.shape[0]):
            j = i - 1
            dph = dphi + half * (-dM + dX * w[j] + X * dw - dZ * (x[j] + u[j]) - Z * du)
            s, c = math.sin(pm[j]), math.cos(pm[j])
            dN = -dX * c + X * s * dph + dZ * s + Z * c * dph
            stretch = 1.0 + nm[j] / EA
            du += (dN / EA * c - stretch * s * dph) * dx
            dw += (-dN / EA * s - stretch * c * dph) * dx
            dphi = dph + half * (-dM + dX * w[i] + X * dw - dZ * (x[i] + u[i]) - Z * du)
        out[0, col] = du
        out[1, col] = dw
        out[2, col] = dphi
    return out


def _sensitivity(f, sec, grid, D):
    return _march_sensitivity(float(f.X), float(f.Z), float(sec.EA), float(sec.EI), grid.dx,
                              grid.x, grid.u, grid.w, grid.phi_mid, grid.N_mid,
                              np.ascontiguousarray(D, dtype=np.float64))


def integrate_sensitivity(f, grid, direction, sec):
    """One column of the Jacobian of the end-displacement map.

    ``direction`` is ``"dX"``, ``"dZ"``, ``"dM"`` or an explicit increment
    triple. The grid must come from :func:`integrate` with the same forces.
    """
    inc = DIRECTIONS[direction] if isinstance(direction, str) else tuple(direction)
    if len(inc) != 3:
        raise ValueError("direction must have three components")
    n = grid.N
    if not (len(grid.x) == len(grid.u) == len(grid.w) == n + 1
            and len(grid.phi_mid) == len(grid.N_mid) == n):
        raise ValueError("integration grid arrays have inconsistent lengths")
    col = _sensitivity(f, sec, grid, np.array(inc, dtype=float).reshape(3, 1))
    return LocalEndDisplacements.from_array(col[:, 0])


def _jacobian_from_grid(f, sec, grid):
    return _sensitivity(f, sec, grid, np.eye(3))


def jacobian(f, sec, L, N):
    """3x3 Jacobian G = d(u_b, w_b, phi_b)/d(X, Z, M)."""
    _, grid = integrate(f, sec, L, N)
    return _jacobian_from_grid(f, sec, grid)


def scaled_residual(r, L):
    return max(abs(r[0]) / L, abs(r[1]) / L, abs(r[2]))


def _solve3(G, r):
    try:
        d = np.linalg.solve(G, r)
    except np.linalg.LinAlgError as exc:
        raise SingularJacobian(str(exc)) from exc
    if not np.all(np.isfinite(d)):
        raise SingularJacobian("Jacobian solve produced non-finite values")
    return d


@dataclass
class ShootingResult:
    forces: EndForces
    grid: IntegrationGrid
    iterations: int
    residuals: list

    def __iter__(self):
        return iter((self.forces, self.grid))


def _newton(t, f, cfg, sec, L, max_halvings):
    """Damped Newton; returns (f, grid, iterations, history).

    A trial step is accepted when either the residual or the natural level
    |G^-1 r| (forces scaled by EI/L^2, moment by EI/L) decreases; the latter
    is insensitive to the large EA/EI scale disparity.
    """
    try:
        end, grid = integrate(EndForces.from_array(f), sec, L, cfg.N)
    except FloatingPointError:
        raise NonConvergence(0, math.inf)
    scale = np.array([sec.EI / L ** 2, sec.EI / L ** 2, sec.EI / L])
    r = t - end.as_array()
    res = scaled_residual(r, L)
    history = [res]
    it = 0
    # at least one correction, so that target changes below tol still move f
    while res > cfg.tol or (it == 0 and res > 0.0):
        if it >= cfg.max_iter or not math.isfinite(res) or res > DIVERGENCE_LIMIT:
            raise NonConvergence(it, res)
        G = _jacobian_from_grid(EndForces.from_array(f), sec, grid)
        delta = _solve3(G, r)
        level = np.linalg.norm(delta / scale)
        it += 1
        step = 1.0
        for _ in range(max_halvings + 1):
            trial = f + step * delta
            try:
                end_t, grid_t = integrate(EndForces.from_array(trial), sec, L, cfg.N)
                r_t = t - end_t.as_array()
                res_t = scaled_residual(r_t, L)
            except FloatingPointError:
                res_t = math.inf
            if res_t < res:
                break
            if math.isfinite(res_t):
                level_t = np.linalg.norm(np.linalg.solve(G, r_t) / scale)
                if level_t < (1.0 - 0.25 * step) * level:
                    break
            step *= 0.5
        else:
            # round-off floor: no step improves the residual any further
            if res <= 1e3 * cfg.tol:
                break
            raise NonConvergence(it, res)
        f, r, res, grid = trial, r_t, res_t, grid_t
        history.append(res)
    return f, grid, it, history


def _continuation(t, cfg, sec, L, max_halvings, max_substeps):
    """Walk the target from the unloaded state in adaptive increments."""
    f = np.zeros(3)
    s, ds = 0.0, 0.25
    total = 0
    for _ in range(max_substeps):
        s_next = min(1.0, s + ds)
        try:
            f_new, grid, it, hist = _newton(s_next * t, f, cfg, sec, L, max_halvings)
        except (NonConvergence, SingularJacobian):
            ds *= 0.5
            if ds < 1e-6:
                break
            continue
        total += it
        f, s = f_new, s_next
        if s >= 1.0:
            return f, grid, total, hist
        if it <= 4:
            ds *= 2.0
    raise NonConvergence(total, math.inf)


def solve_end_forces(target, f0, cfg, sec, L, max_halvings=8, max_substeps=200, fallback=True):
    """Find left-end forces whose integration reproduces ``target``.

    Newton iteration on g(f) = target with the scaled max-norm (lengths over
    L, rotations as is). A trial step that does not reduce the residual is
    halved. If Newton from ``f0`` still fails, the solution is first found
    for an axially soft section by stepping the target up from the unloaded
    state, and the axial stiffness is then raised back to its true value;
    ``fallback=False`` skips that stage.
    """
    t = target.as_array()
    try:
        f, grid, it, hist = _newton(t, f0.as_array().astype(float), cfg, sec, L, max_halvings)
        return ShootingResult(EndForces.from_array(f), grid, it, hist)
    except (NonConvergence, SingularJacobian) as exc:
        if not fallback:
            raise
        first_failure = exc

    soft = 100.0 * sec.EI / L ** 2
    ladder = [sec.EA]
    while ladder[-1] / math.sqrt(10.0) > soft:
        ladder.append(ladder[-1] / math.sqrt(10.0))
    ladder.reverse()
    try:
        f, grid, total, hist = _continuation(
            t, cfg, SectionProperties(ladder[0], sec.EI), L, max_halvings, max_substeps)
        for EA in ladder[1:]:
            f, grid, it, hist = _newton(t, f, cfg, SectionProperties(EA, sec.EI), L, max_halvings)
            total += it
    except (NonConvergence, SingularJacobian):
        raise first_failure
    return ShootingResult(EndForces.from_array(f), grid, total, hist)


def initial_guess(target, sec, L, N=20):
    """Linear-theory estimate G(0)^-1 * target."""
    G0 = jacobian(EndForces(), sec, L, N)
    return EndForces.from_array(_solve3(G0, target.as_array()))


def linear_compliance(sec, L):
    """Continuum clamped-free compliance of a straight Euler-Bernoulli beam."""
    EA, EI = sec.EA, sec.EI
    return np.array([
        [-L / EA, 0.0, 0.0],
        [0.0, L ** 3 / (6 * EI), L ** 2 / (2 * EI)],
        [0.0, -L ** 2 / (2 * EI), -L / EI],
    ])
