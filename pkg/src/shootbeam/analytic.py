"""Closed-form elastica for the axially inextensible beam, and critical loads.

The rotation solves EI phi'' + X sin(phi) + Z cos(phi) = 0 with phi(0) = phi_a
and phi'(0) = kappa_a = -M/EI. Only moduli in [0, 1) are ever passed to the
elliptic routines: the libration regime (an inflexion exists) uses the
reciprocal modulus k_tilde = 1/k, the rotating regime uses k directly.
"""

import math
from dataclasses import dataclass
from typing import NamedTuple

from .elliptic import K_MAX, complete_E, complete_K, incomplete_E, incomplete_F, jacobi_elliptic
from .errors import DegenerateState, EllipticDomainError, NoBuckling, NoInflexion

_TINY = 1e-14


@dataclass(frozen=True)
class AnalyticConstants:
    EI: float
    X: float
    Z: float
    M: float
    phi_a: float
    kappa_a: float
    sgn: int
    F: float
    N: float
    A: float
    alpha: float
    c1: float
    c2: float
    c3: float
    k: float
    k_tilde: float
    a: float
    b: float
    a_tilde: float
    b_tilde: float
    turns: int

    @property
    def has_inflexion(self):
        """True in the libration regime, where the curvature changes sign."""
        return self.k_tilde < 1.0


def _sign(v):
    return 1 if v > 0 else -1 if v < 0 else 0


def constants_from_state(X, Z, M, phi_a, EI, sgn=None):
    """Solution constants for left-end forces (X, Z, M) and rotation phi_a.

    ``sgn`` fixes the sign of the initial curvature when M = 0; by default
    it follows the sign of phi'' at x = 0 and falls back to -1.
    """
    if not EI > 0:
        raise ValueError("EI must be positive")
    F = math.hypot(X, Z)
    kappa = -M / EI
    if F == 0.0:
        raise DegenerateState("X = Z = 0: constant curvature, use uniform_curvature")
    alpha = math.atan2(Z, X)
    N = -X * math.cos(phi_a) + Z * math.sin(phi_a)
    denom = 2.0 * (F + N) + EI * kappa * kappa
    if M == 0.0 and denom <= _TINY * F:
        raise DegenerateState("end force aligned with the axis and no moment: straight solution")
    if kappa != 0.0:
        s = _sign(kappa)
    elif sgn is not None:
        if sgn not in (-1, 1):
            raise ValueError("sgn must be +1 or -1")
        s = sgn
    else:
        s = -_sign(math.sin(phi_a + alpha)) or -1
    c1 = kappa * kappa + 2.0 * N / EI
    A = 2.0 * F / EI
    k = math.sqrt(4.0 * F / denom)
    k_t = 1.0 / k
    theta = 0.5 * (phi_a + alpha)
    a = b = a_t = b_t = math.nan
    turns = 0
    if k_t < 1.0:
        # shift theta into [-pi/2, pi/2]; phi picks up 2*pi per turn
        turns = round(theta / math.pi)
        th = theta - turns * math.pi
        arg = max(-1.0, min(1.0, k * math.sin(th)))
        a_t = incomplete_F(math.asin(arg), k_t)
        b_t = math.sqrt(F / EI) * s
    elif k_t > 1.0:
        a = incomplete_F(theta, k)
        b = 0.5 * math.sqrt(c1 + A) * s
    else:
        raise EllipticDomainError("modulus k = 1 (separatrix) is not supported")
    return AnalyticConstants(EI, X, Z, M, phi_a, kappa, s, F, N, A, alpha, c1,
                             2.0 * X / EI, -2.0 * Z / EI, k, k_t, a, b, a_t, b_t, turns)


def _libration_phi(arg, c):
    _, sn, _, _ = jacobi_elliptic(arg, c.k_tilde)
    return 2.0 * math.asin(max(-1.0, min(1.0, c.k_tilde * sn))) + 2.0 * math.pi * c.turns - c.alpha


def rotation_field(x, c):
    """phi(x) on [0, x_in] (or any x >= 0 when there is no inflexion)."""
    if x < 0:
        raise EllipticDomainError(f"x={x!r} is negative")
    if c.has_inflexion:
        x_in, _ = inflexion_point(c)
        if x > x_in * (1.0 + 1e-12) + 1e-15:
            raise EllipticDomainError(
                f"x={x!r} lies beyond the inflexion point x_in={x_in!r}; use inflexion_rotation_field")
        return _libration_phi(c.a_tilde + c.b_tilde * x, c)
    am, _, _, _ = jacobi_elliptic(c.a + c.b * x, c.k)
    return 2.0 * am - c.alpha


def displacement_field(x, c, Cu=0.0, Cw=0.0):
    """Inextensible centerline displacements (u_s, w_s) on the pre-inflexion segment."""
    sa, ca = math.sin(c.alpha), math.cos(c.alpha)
    if c.has_inflexion:
        kt, bt = c.k_tilde, c.b_tilde
        am, _, cn, _ = jacobi_elliptic(c.a_tilde + bt * x, kt)
        e = 2.0 / bt * incomplete_E(am, kt) - x
        u = Cu - x - 2.0 * kt / bt * cn * sa + e * ca
        w = Cw + 2.0 * kt / bt * cn * ca + e * sa
        return u, w
    k, b = c.k, c.b
    am, _, _, dn = jacobi_elliptic(c.a + b * x, k)
    f = 2.0 / (b * k * k)
    e = f * incomplete_E(am, k) + x - 2.0 * x / (k * k)
    u = Cu - x - f * dn * sa + e * ca
    w = Cw + f * dn * ca + e * sa
    return u, w


def displacement_constants(c, x0=0.0, u0=0.0, w0=0.0):
    """Integration constants (Cu, Cw) that make the field pass through (u0, w0) at x0."""
    u, w = displacement_field(x0, c)
    return u0 - u, w0 - w


def uniform_curvature(x, phi_a, kappa_a):
    return phi_a + kappa_a * x


def straight_solution(c_or_alpha):
    """Constant rotation -alpha of the aligned-force, moment-free state."""
    alpha = getattr(c_or_alpha, "alpha", c_or_alpha)
    return -alpha


def inflexion_point(c):
    """Position and rotation of the first inflexion point ahead of x = 0."""
    if not c.has_inflexion:
        raise NoInflexion(f"k_tilde={c.k_tilde!r} >= 1: curvature never changes sign")
    Kt = complete_K(min(c.k_tilde, 1.0 - 1e-12))
    x_in = (c.sgn * Kt - c.a_tilde) / c.b_tilde
    if abs(x_in) <= 1e-15 * max(1.0, Kt / abs(c.b_tilde)):
        x_in = 0.0
    phi_in = 2.0 * c.sgn * math.asin(c.k_tilde) + 2.0 * math.pi * c.turns - c.alpha
    return x_in, phi_in


def inflexion_rotation_field(x, c, L=None):
    """phi(x) past the inflexion point, where the curvature sign is reversed."""
    x_in, _ = inflexion_point(c)
    if x < x_in * (1.0 - 1e-12) - 1e-15 or (L is not None and x > L):
        raise EllipticDomainError(f"x={x!r} outside [x_in={x_in!r}, L={L!r}]")
    Kt = complete_K(c.k_tilde)
    return _libration_phi(2.0 * c.sgn * Kt - c.a_tilde - c.b_tilde * x, c)


# cantilever fixed at its right end, loaded at the left end by a force
# inclined by alpha (clockwise from the axis)

def _cantilever_args(phi, alpha):
    if not 0.0 <= alpha < math.pi:
        raise EllipticDomainError(f"alpha={alpha!r} outside [0, pi)")
    s = alpha + phi
    if not 0.0 < s <= math.pi:
        raise EllipticDomainError(f"alpha + phi = {s!r} outside (0, pi]")
    # half-angle forms avoid cancellation in 1 - cos for small angles
    m = math.sin(0.5 * s)
    ratio = min(1.0, (math.sin(0.5 * alpha) / m) ** 2)
    return math.asin(math.sqrt(ratio)), m


def cantilever_B(phi, alpha):
    amp, m = _cantilever_args(phi, alpha)
    return complete_K(m) - incomplete_F(amp, m)


def cantilever_D(phi, alpha):
    amp, m = _cantilever_args(phi, alpha)
    return incomplete_E(amp, m)


@dataclass(frozen=True)
class CantileverSolution:
    alpha: float
    phi_a: float
    F: float
    u_a: float
    w_a: float
    u_F: float


def cantilever_solution(phi_a, alpha, L, EI):
    B = cantilever_B(phi_a, alpha)
    D = cantilever_D(phi_a, alpha)
    s = alpha + phi_a
    E = complete_E(math.sin(0.5 * s))
    root = 2.0 * math.sqrt(max(0.0, math.sin(0.5 * s) ** 2 - math.sin(0.5 * alpha) ** 2))
    ca, sa = math.cos(alpha), math.sin(alpha)
    u_a = L * (1.0 + ca) - L * sa / B * root - 2.0 * L * ca / B * (E - D)
    w_a = L * sa + L * ca / B * root - 2.0 * L * sa / B * (E - D)
    u_F = L * (1.0 + ca) - 2.0 * L / B * (E - D)
    return CantileverSolution(alpha, phi_a, EI / L ** 2 * B * B, u_a, w_a, u_F)


def cantilever_phi_for_force(F, alpha, L, EI, tol=1e-14):
    """Invert F(phi_a) on (0, pi - alpha] by bisection; F must exceed the onset value."""
    target = L * math.sqrt(F / EI)
    # upper end keeps the modulus sin((alpha + phi)/2) inside the supported range
    lo, hi = 1e-12, 2.0 * math.asin(K_MAX) - alpha
    f_lo = cantilever_B(lo, alpha) - target
    f_hi = cantilever_B(hi, alpha) - target
    if f_lo * f_hi > 0:
        raise EllipticDomainError(f"force {F!r} outside the range of the cantilever branch")
    while hi - lo > tol * max(1.0, hi):
        mid = 0.5 * (lo + hi)
        f_mid = cantilever_B(mid, alpha) - target
        if (f_mid > 0) == (f_hi > 0):
            hi, f_hi = mid, f_mid
        else:
            lo, f_lo = mid, f_mid
    return 0.5 * (lo + hi)


class CriticalLoad(NamedTuple):
    exact: float
    approx: float
    euler: float


def critical_load(EA, EI, L_b):
    """Buckling load of the axially compressible column of buckling length L_b."""
    euler = EI * math.pi ** 2 / L_b ** 2
    if 4.0 * euler >= EA:
        raise NoBuckling(f"EA={EA!r} <= 4*P_E={4 * euler!r}: stability is never lost")
    # rationalized root: no cancellation when EA >> P_E
    exact = 2.0 * euler / (1.0 + math.sqrt(1.0 - 4.0 * euler / EA))
    return CriticalLoad(exact, euler * (1.0 + euler / EA), euler)
