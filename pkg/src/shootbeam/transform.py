"""Rigid-body (phase A) transformation and the global element tangent.

Global axes: x to the right, z downwards, rotations positive anticlockwise
as drawn. The undeformed chord direction is stored by its cosines so that
no quadrant bookkeeping is needed.
"""

import math
from dataclasses import dataclass

import numpy as np

from .element import LocalEndDisplacements


@dataclass(frozen=True)
class ElementGeometry:
    L: float
    cos_alpha0: float
    sin_alpha0: float

    def __post_init__(self):
        if not self.L > 0:
            raise ValueError(f"element length must be positive, got {self.L}")
        if abs(self.cos_alpha0 ** 2 + self.sin_alpha0 ** 2 - 1.0) > 1e-14:
            raise ValueError("direction cosines are not normalized")

    @classmethod
    def from_coords(cls, xa, za, xb, zb):
        dx, dz = xb - xa, zb - za
        L = math.hypot(dx, dz)
        if L == 0.0:
            raise ValueError("element end points coincide")
        c, s = dx / L, dz / L
        # renormalize so the invariant holds to round-off
        n = math.hypot(c, s)
        return cls(L, c / n, s / n)


@dataclass(frozen=True)
class GlobalNodeState:
    u: float = 0.0
    w: float = 0.0
    phi: float = 0.0

    def as_array(self):
        return np.array([self.u, self.w, self.phi])


@dataclass(frozen=True)
class GlobalEndForces:
    X_ab: float
    Z_ab: float
    M_ab: float
    X_ba: float
    Z_ba: float
    M_ba: float

    def as_array(self):
        return np.array([self.X_ab, self.Z_ab, self.M_ab, self.X_ba, self.Z_ba, self.M_ba])


def _alpha_ab(phi_a, geom):
    """cos and sin of alpha0 - phi_a."""
    ca, sa = math.cos(phi_a), math.sin(phi_a)
    c0, s0 = geom.cos_alpha0, geom.sin_alpha0
    return c0 * ca + s0 * sa, s0 * ca - c0 * sa


def rotation_matrix(phi_a, geom):
    """T(phi_a) mapping global differences to the co-rotated frame."""
    c, s = _alpha_ab(phi_a, geom)
    return np.array([[c, s, 0.0], [-s, c, 0.0], [0.0, 0.0, 1.0]])


def _rotation_derivative(phi_a, geom):
    c, s = _alpha_ab(phi_a, geom)
    return np.array([[s, -c, 0.0], [c, s, 0.0], [0.0, 0.0, 0.0]])


def _offset(phi_a, L):
    return L * np.array([math.cos(phi_a) - 1.0, math.sin(phi_a), 0.0])


def _offset_derivative(phi_a, L):
    return L * np.array([-math.sin(phi_a), math.cos(phi_a), 0.0])


def local_target(node_a, node_b, geom):
    """Right-end displacements relative to the co-rotated left end."""
    d = node_b.as_array() - node_a.as_array()
    v = rotation_matrix(node_a.phi, geom) @ d + _offset(node_a.phi, geom.L)
    return LocalEndDisplacements.from_array(v)


def global_forces(f, local, phi_a_G, geom):
    c, s = _alpha_ab(phi_a_G, geom)
    XG = f.X * c - f.Z * s
    ZG = f.X * s + f.Z * c
    M_ba = -f.M + f.X * local.w - f.Z * (geom.L + local.u)
    return GlobalEndForces(XG, ZG, f.M, -XG, -ZG, M_ba)


def tangent_stiffness(f, Ginv, node_a, node_b, geom):
    """Consistent 6x6 tangent in global components, DOFs (u_a, w_a, phi_a, u_b, w_b, phi_b).

    Rows 1-3 follow from differentiating f_G = T^T g^-1(T dU + l); rows 4-5
    are their negatives; row 6 is copied from column 6 with k66 recovered
    from the right-end moment equilibrium.
    """
    phi_a = node_a.phi
    T = rotation_matrix(phi_a, geom)
    Tp = _rotation_derivative(phi_a, geom)
    d = node_b.as_array() - node_a.as_array()
    fa = f.as_array()

    B = T.T @ Ginv @ T
    col_phi = T.T @ (Ginv @ (Tp @ d + _offset_derivative(phi_a, geom.L))) + Tp.T @ fa

    k = np.zeros((6, 6))
    k[0:3, 3:6] = B
    k[0:3, 0:3] = -B
    k[0:3, 2] += col_phi
    k[3:5, :] = -k[0:2, :]
    k[5, 0:5] = k[0:5, 5]
    dz = geom.L * geom.sin_alpha0 + d[1]
    dxc = geom.L * geom.cos_alpha0 + d[0]
    k[5, 5] = dz * k[0, 5] - dxc * k[1, 5] - k[2, 5]
    return k


def rigid_body_modes(node_a, node_b, geom):
    """Three infinitesimal rigid motions of the deformed element (rows)."""
    dz = geom.L * geom.sin_alpha0 + node_b.w - node_a.w
    dxc = geom.L * geom.cos_alpha0 + node_b.u - node_a.u
    return np.array([
        [1.0, 0.0, 0.0, 1.0, 0.0, 0.0],
        [0.0, 1.0, 0.0, 0.0, 1.0, 0.0],
        [0.0, 0.0, 1.0, dz, -dxc, 1.0],
    ])
