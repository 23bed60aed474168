"""Elliptic integrals and Jacobi elliptic functions.

Complete integrals use the arithmetic-geometric mean; incomplete integrals
and the Jacobi functions use the descending Landen (Gauss) transformation.
Everything is scalar and pure-Python so the analytic solutions do not need
an external special-function library.

Moduli above one are accepted by :func:`incomplete_F`, :func:`incomplete_E`
and :func:`jacobi_elliptic_ext` through the reciprocal-modulus identities.
"""

import math

from .errors import EllipticDomainError

K_MAX = 1.0 - 1e-12

_EPS = 1e-16
_MAX_STEPS = 40


def _check_modulus(k, upper=K_MAX):
    if not (0.0 <= k <= upper) or math.isnan(k):
        raise EllipticDomainError(f"modulus k={k!r} outside [0, {upper!r}]")


def _complementary(k):
    return math.sqrt((1.0 - k) * (1.0 + k))


def _agm_sequence(k):
    """Return lists a_n, b_n, c_n of the AGM started from (1, k', k)."""
    a, b, c = [1.0], [_complementary(k)], [k]
    while abs(c[-1]) > _EPS * a[-1] and len(a) < _MAX_STEPS:
        an, bn = a[-1], b[-1]
        a.append(0.5 * (an + bn))
        b.append(math.sqrt(an * bn))
        c.append(0.5 * (an - bn))
    return a, b, c


def complete_K(k):
    """Complete elliptic integral of the first kind, K(k)."""
    _check_modulus(k)
    if k == 0.0:
        return 0.5 * math.pi
    a, _, _ = _agm_sequence(k)
    return 0.5 * math.pi / a[-1]


def complete_E(k):
    """Complete elliptic integral of the second kind, E(k), for 0 <= k <= 1."""
    _check_modulus(k, upper=1.0)
    if k == 0.0:
        return 0.5 * math.pi
    if k == 1.0:
        return 1.0
    if k > K_MAX:
        # K diverges here; E - 1 ~ (k'^2 / 2) * (log(4/k') - 1/2)
        kp2 = (1.0 - k) * (1.0 + k)
        kp = math.sqrt(kp2)
        return 1.0 + 0.5 * kp2 * (math.log(4.0 / kp) - 0.5)
    a, _, c = _agm_sequence(k)
    s = 0.0
    for n, cn in enumerate(c):
        s += 2.0 ** (n - 1) * cn * cn
    return 0.5 * math.pi / a[-1] * (1.0 - s)


def _landen_angles(phi, k):
    """Descending Landen sweep for amplitude phi.

    Returns (a, c, angles) where angles[n] is the transformed amplitude
    after n steps, kept on the branch continuous with phi.
    """
    a, b, c = _agm_sequence(k)
    angles = [phi]
    for n in range(1, len(a)):
        p = angles[-1]
        t = math.atan2(b[n - 1] * math.sin(p), a[n - 1] * math.cos(p))
        t += 2.0 * math.pi * round((p - t) / (2.0 * math.pi))
        angles.append(p + t)
    return a, c, angles


def _F_small(phi, k):
    if k == 0.0:
        return phi
    a, _, angles = _landen_angles(phi, k)
    n = len(a) - 1
    return angles[-1] / (2.0 ** n * a[-1])


def _E_small(phi, k):
    if k == 0.0:
        return phi
    a, c, angles = _landen_angles(phi, k)
    n = len(a) - 1
    F = angles[-1] / (2.0 ** n * a[-1])
    s = 0.0
    for j, cj in enumerate(c):
        s += 2.0 ** (j - 1) * cj * cj
    corr = 0.0
    for j in range(1, n + 1):
        corr += c[j] * math.sin(angles[j])
    return F * (1.0 - s) + corr


def _reciprocal_amplitude(phi, k):
    limit = math.asin(1.0 / k)
    if abs(phi) >= limit:
        raise EllipticDomainError(
            f"|phi|={abs(phi)!r} must stay below arcsin(1/k)={limit!r} for k={k!r}")
    return math.asin(k * math.sin(phi)), 1.0 / k


def incomplete_F(phi, k):
    """Incomplete elliptic integral of the first kind F(phi, k)."""
    if k > 1.0:
        phi_t, k_t = _reciprocal_amplitude(phi, k)
        return k_t * _F_small(phi_t, k_t)
    _check_modulus(k)
    return _F_small(phi, k)


def incomplete_E(phi, k):
    """Incomplete elliptic integral of the second kind E(phi, k)."""
    if k > 1.0:
        phi_t, k_t = _reciprocal_amplitude(phi, k)
        return _E_small(phi_t, k_t) / k_t + (k_t - 1.0 / k_t) * _F_small(phi_t, k_t)
    _check_modulus(k)
    return _E_small(phi, k)


def jacobi_elliptic(x, k):
    """Return ``(am, sn, cn, dn)`` at argument x for 0 <= k <= 1 - 1e-12.

    The amplitude is continuous in x, so ``am(x + 2K) = am(x) + pi``.
    """
    _check_modulus(k)
    if k == 0.0:
        return x, math.sin(x), math.cos(x), 1.0
    a, _, c = _agm_sequence(k)
    n = len(a) - 1
    phi = 2.0 ** n * a[-1] * x
    for j in range(n, 0, -1):
        phi = 0.5 * (phi + math.asin(c[j] / a[j] * math.sin(phi)))
    sn = math.sin(phi)
    return phi, sn, math.cos(phi), math.sqrt(1.0 - k * k * sn * sn)


def jacobi_elliptic_ext(x, k):
    """Jacobi functions for any modulus k >= 0.

    For k > 1 the reciprocal-modulus identities are applied; ``am`` is then
    only meaningful while ``|sn| <= 1/k`` holds on the principal branch, that
    is for ``|x| <= K(1/k) / k``.
    """
    if k <= 1.0:
        return jacobi_elliptic(x, k)
    k_t = 1.0 / k
    _, sn_t, cn_t, dn_t = jacobi_elliptic(x / k_t, k_t)
    sn = k_t * sn_t
    return math.asin(max(-1.0, min(1.0, sn))), sn, dn_t, cn_t
