"""Sudden-limit SIS locus and the critical spin-orbit ratio."""

from __future__ import annotations

import math

import numpy as np
from scipy.optimize import brentq, minimize_scalar

from ..model import ModelError, hz_static, spin_orbit_arrays

CRITICAL_TOL = 1e-6
SCAN_POINTS = 4097
T_MAX = 1e6


class NoSolutionError(ModelError):
    """The sudden-limit locus never meets the diagonal."""


def sis_g0_locus(kx, ky, m_z_int: float, m_z_f: float, t0: float = 1.0, t_so: float = 0.2,
                 variant: str = "standard") -> np.ndarray:
    """f(k) = h0_f h0_int + hx^2 + hy^2; its zero set is where P_u - P_d vanishes for g -> 0."""
    hx, hy = spin_orbit_arrays(kx, ky, t_so, variant)
    return hz_static(kx, ky, m_z_f, t0) * hz_static(kx, ky, m_z_int, t0) + hx**2 + hy**2


def sis_g0_diagonal_zeros(m_z_int: float, m_z_f: float, t0: float = 1.0, t_so: float = 0.2,
                          variant: str = "standard", n_scan: int = SCAN_POINTS) -> np.ndarray:
    """Zeros of the sudden-limit locus along kx = ky = k, k in [-pi, pi)."""
    def f(k):
        return sis_g0_locus(k, k, m_z_int, m_z_f, t0, t_so, variant)

    k = np.linspace(-np.pi, np.pi, n_scan)
    v = f(k)
    roots = []
    for i in np.nonzero(np.sign(v[:-1]) * np.sign(v[1:]) <= 0)[0]:
        if v[i] == 0:
            roots.append(k[i])
        elif v[i + 1] != 0:
            roots.append(brentq(f, k[i], k[i + 1], xtol=1e-13))
    roots = np.unique(np.round(np.mod(np.asarray(roots) + np.pi, 2 * np.pi) - np.pi, 12))
    return roots


def _diagonal_parts(m_int: float, m_f: float, t0: float):
    # on the diagonal f = A(k) + t_so^2 S(k), with S >= 0 vanishing at k = 0, pi
    def a(k):
        c = np.cos(k)
        return (m_f - 2 * t0 * c) * (m_int - 2 * t0 * c)

    def s(k):
        return 2 * np.sin(k) ** 2

    return a, s


def _min_on_half_line(fun) -> float:
    k = np.linspace(0.0, np.pi, SCAN_POINTS)
    v = fun(k)
    i = int(np.argmin(v))
    lo, hi = k[max(i - 1, 0)], k[min(i + 1, len(k) - 1)]
    if hi > lo:
        res = minimize_scalar(fun, bounds=(lo, hi), method="bounded", options={"xatol": 1e-12})
        return float(min(v[i], res.fun))
    return float(v[i])


def critical_tso(m_z_int: float, m_z_f: float, t0: float = 1.0) -> float:
    """Largest t_so / t0 at which the sudden-limit locus still meets the diagonal.

    The antisymmetric case m_z_int = -m_z_f = m has the closed form
    |m| / (sqrt(2) t0).  Otherwise the diagonal minimum of the locus, which
    grows monotonically with t_so, is bisected to zero.  Returns inf when the
    locus crosses the diagonal for every t_so.
    """
    if not t0 > 0:
        raise ModelError("t0 must be positive")
    if m_z_int == -m_z_f:
        if m_z_int == 0:
            raise NoSolutionError("m_z_int = m_z_f = 0 gives a gapless locus")
        return abs(m_z_int) / (math.sqrt(2.0) * t0)

    a, s = _diagonal_parts(m_z_int, m_z_f, t0)

    def fmin(t):
        return _min_on_half_line(lambda k: a(k) + t * t * s(k))

    if min(a(0.0), a(np.pi)) <= 0:
        return math.inf  # a root at k = 0 or pi that no t_so can lift
    if fmin(0.0) > 0:
        raise NoSolutionError(
            f"no diagonal root for any t_so (m_z_int={m_z_int}, m_z_f={m_z_f})")
    lo, hi = 0.0, 1.0
    while fmin(hi) <= 0:
        lo, hi = hi, 2 * hi
        if hi > T_MAX:
            return math.inf
    while hi - lo > CRITICAL_TOL * t0 * 1e-2:
        mid = 0.5 * (lo + hi)
        if fmin(mid) <= 0:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi) / t0
