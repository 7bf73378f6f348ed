"""Quench dynamics of the two-level Bloch Hamiltonian and the resulting
time-averaged spin polarization (TASP).

Slow quenches (g > 0) are integrated numerically per k point up to a switch
time after which the remaining evolution is adiabatic, then projected on the
instantaneous eigenbasis.  Sudden quenches (g = 0) project the initial ground
state straight onto the final eigenbasis.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field

import numpy as np

from . import _kernels as K
from .model import (
    FieldVector,
    GaplessError,
    ModelError,
    ModelParams,
    Momentum,
    bz_axis,
    field_at,
    hz_static,
    spin_orbit_arrays,
)

START_FRACTION = 1e-6  # t_start = START_FRACTION * g for the 0+ protocol
SWITCH_FACTOR = 1e-3  # project once g/t = SWITCH_FACTOR * eps_f
LOCAL_TOL = 1e-8  # local error per unit time
EPS_STEP = 0.05  # dt <= EPS_STEP / eps(t)
T_STEP = 0.05  # dt <= T_STEP * t
DEFAULT_PERIODS = 8


class EvolutionError(RuntimeError):
    """Numerical failure while propagating one k point."""

    def __init__(self, message: str, k: Momentum | None = None):
        if k is not None:
            message = f"{message} at k=({k.kx:.6g}, {k.ky:.6g})"
        super().__init__(message)
        self.k = k


class StepUnderflowError(EvolutionError):
    pass


class NormDriftError(EvolutionError):
    pass


class WindowError(ValueError):
    """Averaging window reaches back before the projection time."""


class ApplicabilityError(ValueError):
    """Closed form called outside the protocol it was derived for."""


@dataclass(frozen=True)
class QuantumState:
    a_up: complex
    a_down: complex

    @property
    def norm2(self) -> float:
        return abs(self.a_up) ** 2 + abs(self.a_down) ** 2

    def as_array(self) -> np.ndarray:
        return np.array([self.a_up, self.a_down], dtype=complex)

    def expectation(self) -> np.ndarray:
        """<sigma_x>, <sigma_y>, <sigma_z>."""
        cross = 2 * np.conj(self.a_up) * self.a_down
        return np.array([cross.real, cross.imag, abs(self.a_up) ** 2 - abs(self.a_down) ** 2])


@dataclass(frozen=True)
class EvolutionResult:
    p_up: float
    p_down: float
    final_state: QuantumState
    phase: float
    t_switch: float = 0.0
    n_steps: int = 0
    max_norm_drift: float = 0.0

    @property
    def polarization(self) -> float:
        """P_u - P_d."""
        return self.p_up - self.p_down


@dataclass(frozen=True)
class TaspVector:
    sx: float
    sy: float
    sz: float

    def as_array(self) -> np.ndarray:
        return np.array([self.sx, self.sy, self.sz])

    @classmethod
    def from_array(cls, v) -> "TaspVector":
        return cls(float(v[0]), float(v[1]), float(v[2]))


@dataclass
class TaspGrid:
    """TASP sampled on the uniform n x n Brillouin-zone grid.

    ``data[i, j]`` holds (sx, sy, sz) at ``(kx, ky) = (ks[i], ks[j])``.
    """

    grid_n: int
    data: np.ndarray
    params: ModelParams
    polarization: np.ndarray | None = field(default=None, repr=False)

    def __post_init__(self):
        if self.data.shape != (self.grid_n, self.grid_n, 3):
            raise ValueError(f"data shape {self.data.shape} does not match grid_n={self.grid_n}")

    @property
    def ks(self) -> np.ndarray:
        return bz_axis(self.grid_n)

    @property
    def spacing(self) -> float:
        return 2 * np.pi / self.grid_n

    @property
    def sx(self) -> np.ndarray:
        return self.data[..., 0]

    @property
    def sy(self) -> np.ndarray:
        return self.data[..., 1]

    @property
    def sz(self) -> np.ndarray:
        return self.data[..., 2]

    def at(self, i: int, j: int) -> TaspVector:
        return TaspVector.from_array(self.data[i % self.grid_n, j % self.grid_n])

    def momentum(self, i: int, j: int) -> Momentum:
        ks = self.ks
        return Momentum(ks[i % self.grid_n], ks[j % self.grid_n])


def _ground_vec(hx, hy, hz):
    e = math.sqrt(hx * hx + hy * hy + hz * hz)
    if e == 0:
        raise GaplessError("ground state undefined for a vanishing field")
    if hz <= 0:
        v = np.array([e - hz, -(hx + 1j * hy)], dtype=complex)
    else:
        v = np.array([hx - 1j * hy, -(e + hz)], dtype=complex)
    v /= np.linalg.norm(v)
    return _fix_phase(v)


def _excited_vec(hx, hy, hz):
    e = math.sqrt(hx * hx + hy * hy + hz * hz)
    if e == 0:
        raise GaplessError("excited state undefined for a vanishing field")
    if hz >= 0:
        v = np.array([e + hz, hx + 1j * hy], dtype=complex)
    else:
        v = np.array([hx - 1j * hy, e - hz], dtype=complex)
    v /= np.linalg.norm(v)
    return _fix_phase(v)


def _fix_phase(v):
    # a_up real and >= 0, or a_down real and >= 0 when a_up vanishes
    ref = v[0] if abs(v[0]) > 1e-15 else v[1]
    return v * (abs(ref) / ref)


def ground_state(field: FieldVector) -> QuantumState:
    v = _ground_vec(field.hx, field.hy, field.hz)
    return QuantumState(complex(v[0]), complex(v[1]))


def _reduced(params: ModelParams, k: Momentum):
    hx, hy = spin_orbit_arrays(k.kx, k.ky, params.t_so, params.variant)
    hx, hy = float(hx), float(hy)
    h0 = float(hz_static(k.kx, k.ky, params.m_z, params.t0))
    return h0, math.hypot(hx, hy), math.atan2(hy, hx)


def final_field(params: ModelParams, k: Momentum) -> FieldVector:
    return field_at(params, k, params.t_f)


def switch_time(params: ModelParams, eps_f, factor: float = SWITCH_FACTOR, full: bool = False):
    """Projection time: where g/t drops to factor * eps_f, clipped to [t_int, t_f]."""
    eps_f = np.asarray(eps_f, dtype=float)
    if full or params.g == 0:
        return np.full_like(eps_f, params.t_f)
    with np.errstate(divide="ignore"):
        t = params.g / (factor * eps_f)
    return np.clip(t, params.t_int, params.t_f)


def _start(params: ModelParams) -> tuple[float, bool]:
    if params.starts_at_zero:
        return START_FRACTION * params.g, True
    return params.t_int, False


def _check_final_gap(params: ModelParams, eps_f, k=None):
    if np.any(np.asarray(eps_f) == 0):
        raise GaplessError("final Hamiltonian is gapless" + (f" at {k}" if k else ""))
    if params.g > 0 and np.any(params.g / params.t_f >= 0.01 * np.asarray(eps_f)):
        warnings.warn("t_f too small: g/t_f is not negligible against eps_f", RuntimeWarning,
                      stacklevel=3)


def _raise_status(status: int, k: Momentum):
    if status == K.STEP_UNDERFLOW:
        raise StepUnderflowError("adaptive step fell below 1e-12", k)
    if status == K.NORM_DRIFT:
        raise NormDriftError("state norm drifted beyond 1e-7", k)


def _sudden_populations(h0_int, h0_f, b):
    """Reduced-frame projection of the initial ground state on the final basis."""
    e_i = np.hypot(h0_int, b)
    e_f = np.hypot(h0_f, b)
    # cos(theta_f - theta_int) for a shared azimuth
    cos_d = (h0_f * h0_int + b * b) / (e_i * e_f)
    pol = -cos_d
    return 0.5 * (1 + pol), 0.5 * (1 - pol)


def evolve(params: ModelParams, k: Momentum, *, full_integration: bool = False,
           switch_factor: float = SWITCH_FACTOR, tol: float = LOCAL_TOL) -> EvolutionResult:
    h0, b, phi = _reduced(params, k)
    f_fin = final_field(params, k)
    eps_f = f_fin.energy
    _check_final_gap(params, eps_f, k)
    rot = np.exp(1j * phi)

    if params.sudden:
        h0_int = float(hz_static(k.kx, k.ky, params.m_z_int, params.t0))
        f_int = FieldVector(f_fin.hx, f_fin.hy, h0_int)
        psi = _ground_vec(f_int.hx, f_int.hy, f_int.hz)
        cp = np.vdot(_excited_vec(f_fin.hx, f_fin.hy, f_fin.hz), psi)
        cm = np.vdot(_ground_vec(f_fin.hx, f_fin.hy, f_fin.hz), psi)
        p_up, p_down = abs(cp) ** 2, abs(cm) ** 2
        s = p_up + p_down
        return EvolutionResult(p_up / s, p_down / s, QuantumState(complex(psi[0]), complex(psi[1])),
                               float(np.angle(cm * np.conj(cp))), 0.0, 0, 0.0)

    t_start, at_zero = _start(params)
    t_sw = float(switch_time(params, eps_f, switch_factor, full_integration))
    p_up, p_down, rel, a, c, status, n_steps, drift = K.evolve_one(
        h0, b, float(params.protocol_sign), params.g, t_start, at_zero, t_sw,
        tol, EPS_STEP, T_STEP)
    _raise_status(status, k)
    state = QuantumState(complex(a), complex(c * rot))
    return EvolutionResult(float(p_up), float(p_down), state, float(rel), t_sw, int(n_steps),
                           float(drift))


def tasp_from_result(result: EvolutionResult, final_field: FieldVector) -> TaspVector:
    e = final_field.energy
    if e == 0:
        raise GaplessError("TASP undefined where the final field vanishes")
    return TaspVector.from_array(result.polarization * final_field.as_array() / e)


def tasp_time_average(params: ModelParams, k: Momentum, window_periods: int = DEFAULT_PERIODS,
                      samples_per_period: int = 64, **evolve_kw) -> TaspVector:
    """Average <sigma(t)> over whole precession periods ending at t_f.

    The state after the projection time is rebuilt from the projected
    amplitudes and relative phase and precessed under the final field.
    """
    if window_periods < 5:
        raise WindowError("window_periods must be >= 5")
    res = evolve(params, k, **evolve_kw)
    f = final_field(params, k)
    eps = f.energy
    period = np.pi / eps
    window = window_periods * period
    if params.t_f - window < res.t_switch:
        raise WindowError(
            f"window [{params.t_f - window:.4g}, {params.t_f:.4g}] starts before the projection "
            f"time {res.t_switch:.4g}")
    up = _excited_vec(f.hx, f.hy, f.hz)
    dn = _ground_vec(f.hx, f.hy, f.hz)
    n = window_periods * samples_per_period
    tau = np.linspace(-window, 0.0, n + 1)
    amp_up = math.sqrt(res.p_up) * np.exp(-1j * eps * tau)
    amp_dn = math.sqrt(res.p_down) * np.exp(1j * (eps * tau + res.phase))
    psi = amp_up[:, None] * up[None, :] + amp_dn[:, None] * dn[None, :]
    cross = 2 * np.conj(psi[:, 0]) * psi[:, 1]
    s = np.stack([cross.real, cross.imag, np.abs(psi[:, 0]) ** 2 - np.abs(psi[:, 1]) ** 2], axis=1)
    w = np.ones(n + 1)
    w[0] = w[-1] = 0.5
    return TaspVector.from_array((w[:, None] * s).sum(axis=0) / n)


def tasp_sudden_closed_form(k: Momentum, m_z_int: float, m_z_f: float, t0: float = 1.0,
                            t_so: float = 0.2, variant: str = "standard") -> TaspVector:
    """-(h0^f h0^int + h1^2 + h2^2) h_i^f / (eps_int eps_f^2)."""
    hx, hy = spin_orbit_arrays(k.kx, k.ky, t_so, variant)
    hx, hy = float(hx), float(hy)
    h0i = float(hz_static(k.kx, k.ky, m_z_int, t0))
    h0f = float(hz_static(k.kx, k.ky, m_z_f, t0))
    ei = math.sqrt(h0i**2 + hx**2 + hy**2)
    ef = math.sqrt(h0f**2 + hx**2 + hy**2)
    if ei == 0 or ef == 0:
        raise GaplessError("sudden closed form needs both fields gapped")
    pref = -(h0f * h0i + hx**2 + hy**2) / (ei * ef**2)
    return TaspVector(pref * hx, pref * hy, pref * h0f)


def sudden_closed_form_arrays(kx, ky, m_z_int, m_z_f, t0=1.0, t_so=0.2, variant="standard"):
    hx, hy = spin_orbit_arrays(kx, ky, t_so, variant)
    h0i = hz_static(kx, ky, m_z_int, t0)
    h0f = hz_static(kx, ky, m_z_f, t0)
    ei = np.sqrt(h0i**2 + hx**2 + hy**2)
    ef = np.sqrt(h0f**2 + hx**2 + hy**2)
    pref = -(h0f * h0i + hx**2 + hy**2) / (ei * ef**2)
    return np.stack([pref * hx, pref * hy, pref * h0f], axis=-1)


def slow_exact_polarization(h0, eps_f, g):
    """P_u - P_d of the exactly solvable 0+ -> infinity protocol."""
    x = 2 * np.pi * g
    # (exp(-x h0/eps) - cosh x) / sinh x, rearranged to stay finite for large x
    r = np.asarray(h0) / np.asarray(eps_f)
    return (np.exp(-x * (1 + r)) * 2 - 1 - np.exp(-2 * x)) / (1 - np.exp(-2 * x))


def tasp_slow_exact(k: Momentum, params: ModelParams) -> TaspVector:
    if params.g <= 0:
        raise ApplicabilityError("closed form needs g > 0")
    if not params.starts_at_zero or params.protocol_sign != 1:
        raise ApplicabilityError("closed form holds only for t_int = 0+ with the +g/t protocol")
    hx, hy = spin_orbit_arrays(k.kx, k.ky, params.t_so, params.variant)
    h0 = float(hz_static(k.kx, k.ky, params.m_z, params.t0))
    v = np.array([float(hx), float(hy), h0])
    e = float(np.linalg.norm(v))
    if e == 0:
        raise GaplessError("final field vanishes")
    return TaspVector.from_array(float(slow_exact_polarization(h0, e, params.g)) * v / e)


def _set_threads(threads: int | None):
    if threads:
        import numba

        numba.set_num_threads(min(threads, numba.config.NUMBA_NUM_THREADS))


def _unique_pairs(h0, b):
    key = np.round(np.stack([h0.ravel(), b.ravel()], axis=1), 12)
    uniq, inverse = np.unique(key, axis=0, return_inverse=True)
    return uniq[:, 0].copy(), uniq[:, 1].copy(), inverse.ravel()


def polarization_grid(params: ModelParams, kx, ky, *, full_integration: bool = False,
                      switch_factor: float = SWITCH_FACTOR, tol: float = LOCAL_TOL,
                      threads: int | None = None) -> np.ndarray:
    """P_u - P_d on arbitrary arrays of momenta (same shape as kx)."""
    kx = np.asarray(kx, dtype=float)
    ky = np.asarray(ky, dtype=float)
    hx, hy = spin_orbit_arrays(kx, ky, params.t_so, params.variant)
    b = np.hypot(hx, hy)
    h0 = hz_static(kx, ky, params.m_z, params.t0)
    if params.sudden:
        h0i = hz_static(kx, ky, params.m_z_int, params.t0)
        if np.any(np.hypot(h0i, b) == 0) or np.any(np.hypot(h0, b) == 0):
            raise GaplessError("sudden quench across a gapless point")
        pu, pd = _sudden_populations(h0i, h0, b)
        return pu - pd
    hzf = h0 + params.protocol_sign * params.g / params.t_f
    eps_f = np.hypot(hzf, b)
    _check_final_gap(params, eps_f)
    uh0, ub, inverse = _unique_pairs(h0, b)
    u_eps = np.hypot(uh0 + params.protocol_sign * params.g / params.t_f, ub)
    t_sw = switch_time(params, u_eps, switch_factor, full_integration)
    t_start, at_zero = _start(params)
    _set_threads(threads)
    pu, pd, _rel, status, _drift = K.evolve_many(
        uh0, ub, float(params.protocol_sign), params.g, t_start, at_zero, t_sw,
        tol, EPS_STEP, T_STEP)
    bad = np.flatnonzero(status)
    if bad.size:
        idx = np.flatnonzero(inverse == bad[0])[0]
        _raise_status(int(status[bad[0]]), Momentum(kx.ravel()[idx], ky.ravel()[idx]))
    return (pu - pd)[inverse].reshape(kx.shape)


def tasp_on_points(params: ModelParams, kx, ky, **kw) -> np.ndarray:
    """TASP (..., 3) at arbitrary momenta."""
    kx = np.asarray(kx, dtype=float)
    ky = np.asarray(ky, dtype=float)
    pol = polarization_grid(params, kx, ky, **kw)
    hx, hy = spin_orbit_arrays(kx, ky, params.t_so, params.variant)
    m = params.m_z if params.sudden else params.m_final
    hz = hz_static(kx, ky, m, params.t0)
    e = np.sqrt(hx**2 + hy**2 + hz**2)
    return (pol / e)[..., None] * np.stack([hx, hy, hz], axis=-1)


def tasp_grid(params: ModelParams, grid_n: int, **kw) -> TaspGrid:
    if grid_n < 3:
        raise ValueError("grid_n must be >= 3")
    ks = bz_axis(grid_n)
    kx, ky = np.meshgrid(ks, ks, indexing="ij")
    pol = polarization_grid(params, kx, ky, **kw)
    hx, hy = spin_orbit_arrays(kx, ky, params.t_so, params.variant)
    m = params.m_z if params.sudden else params.m_final
    hz = hz_static(kx, ky, m, params.t0)
    e = np.sqrt(hx**2 + hy**2 + hz**2)
    data = (pol / e)[..., None] * np.stack([hx, hy, hz], axis=-1)
    return TaspGrid(grid_n, data, params, pol)


def sudden_tasp_numeric(params: ModelParams, kx, ky, periods: int = DEFAULT_PERIODS,
                        samples_per_period: int = 64, threads: int | None = None) -> np.ndarray:
    """Sudden-quench TASP by direct integration under the static final field.

    Independent of the projection formula: the initial ground state is
    propagated with the adaptive integrator and <sigma(t)> is averaged over
    whole periods with the trapezoid rule.
    """
    if not params.sudden:
        raise ApplicabilityError("sudden_tasp_numeric needs g = 0")
    kx = np.asarray(kx, dtype=float)
    ky = np.asarray(ky, dtype=float)
    hx, hy = spin_orbit_arrays(kx, ky, params.t_so, params.variant)
    b = np.hypot(hx, hy).ravel()
    phi = np.arctan2(hy, hx).ravel()
    h0f = hz_static(kx, ky, params.m_z, params.t0).ravel()
    h0i = hz_static(kx, ky, params.m_z_int, params.t0).ravel()
    _set_threads(threads)
    out, status = K.sudden_average_many(h0i, h0f, b, periods, samples_per_period,
                                        LOCAL_TOL, EPS_STEP)
    if np.any(status):
        i = int(np.flatnonzero(status)[0])
        _raise_status(int(status[i]), Momentum(kx.ravel()[i], ky.ravel()[i]))
    # rotate the in-plane part back by the spin-orbit azimuth
    c, s = np.cos(phi), np.sin(phi)
    sx = out[:, 0] * c - out[:, 1] * s
    sy = out[:, 0] * s + out[:, 1] * c
    return np.stack([sx, sy, out[:, 2]], axis=-1).reshape(kx.shape + (3,))
