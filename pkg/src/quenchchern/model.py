"""Two-band Chern-insulator quench Hamiltonians and their static invariants.

The effective field is

    h(k, t) = (t_so sin kx, t_so sin ky, s*g/t + m_z - t0 cos kx - t0 cos ky)

for the ``standard`` variant, and uses sin 2k in the spin-orbit pair for the
``high_chern`` variant (hz keeps the single-k cosines).
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass, field, replace
from typing import Literal

import numpy as np

Variant = Literal["standard", "high_chern"]
VARIANTS = ("standard", "high_chern")

BOUNDARY_TOL = 1e-12


class ModelError(ValueError):
    """Invalid model parameters or a request outside a formula's domain."""


class PhaseBoundaryError(ModelError):
    """The effective mass sits on a gap-closing boundary."""


class GaplessError(ModelError):
    """The field vanishes, so the eigenbasis is undefined."""


class ChernConvergenceError(ModelError):
    """Berry flux through a plaquette is too large to resolve the invariant."""


@dataclass(frozen=True)
class ModelParams:
    """Physical and protocol parameters of one quench.

    ``t_int = 0`` stands for the symbolic limit 0+ of the g/t protocol.
    ``m_z_int`` is only used by the sudden protocol (``g = 0``), where the
    initial Hamiltonian is the static model at that mass.
    """

    t0: float = 1.0
    t_so: float = 0.2
    m_z: float = 1.0
    g: float = 1.0
    protocol_sign: int = 1
    variant: Variant = "standard"
    t_int: float = 0.0
    t_f: float = 5000.0
    m_z_int: float | None = None

    def __post_init__(self):
        if not self.t0 > 0:
            raise ModelError(f"t0 must be positive, got {self.t0}")
        if self.t_so < 0:
            raise ModelError(f"t_so must be non-negative, got {self.t_so}")
        if self.g < 0:
            raise ModelError(f"g must be non-negative, got {self.g}")
        if self.protocol_sign not in (1, -1):
            raise ModelError(f"protocol_sign must be +1 or -1, got {self.protocol_sign}")
        if self.variant not in VARIANTS:
            raise ModelError(f"unknown variant {self.variant!r}")
        if self.t_int < 0 or not self.t_f > self.t_int:
            raise ModelError(f"need t_f > t_int >= 0, got t_int={self.t_int}, t_f={self.t_f}")
        if self.g == 0 and self.m_z_int is None:
            raise ModelError("sudden quench (g = 0) needs m_z_int")

    @property
    def sudden(self) -> bool:
        return self.g == 0

    @property
    def starts_at_zero(self) -> bool:
        return self.t_int == 0

    def m_eff(self, t: float) -> float:
        """Effective mass s*g/t + m_z at time t."""
        if self.g == 0:
            return self.m_z
        if t <= 0:
            raise ModelError("m_eff diverges at t = 0 for g > 0")
        return self.protocol_sign * self.g / t + self.m_z

    @property
    def m_initial(self) -> float:
        """Mass of the initial Hamiltonian (+-inf for the 0+ start)."""
        if self.sudden:
            return float(self.m_z_int)
        if self.starts_at_zero:
            return math.copysign(math.inf, self.protocol_sign)
        return self.m_eff(self.t_int)

    @property
    def m_final(self) -> float:
        return self.m_eff(self.t_f) if not self.sudden else self.m_z

    def replace(self, **changes) -> "ModelParams":
        return replace(self, **changes)

    def to_dict(self) -> dict:
        return asdict(self)


@dataclass(frozen=True)
class Momentum:
    kx: float
    ky: float

    def __post_init__(self):
        object.__setattr__(self, "kx", wrap_k(self.kx))
        object.__setattr__(self, "ky", wrap_k(self.ky))

    def shifted(self, dx: float, dy: float) -> "Momentum":
        return Momentum(self.kx + dx, self.ky + dy)

    def as_tuple(self) -> tuple[float, float]:
        return (self.kx, self.ky)


def wrap_k(k):
    """Wrap wavenumbers into [-pi, pi)."""
    w = np.mod(np.asarray(k, dtype=float) + np.pi, 2 * np.pi) - np.pi
    if np.ndim(w) == 0:
        return float(w)
    return w


@dataclass(frozen=True)
class FieldVector:
    hx: float
    hy: float
    hz: float

    @property
    def energy(self) -> float:
        return math.sqrt(self.hx**2 + self.hy**2 + self.hz**2)

    @property
    def theta(self) -> float:
        e = self.energy
        if e == 0:
            raise GaplessError("polar angle undefined for a vanishing field")
        return math.acos(max(-1.0, min(1.0, self.hz / e)))

    @property
    def phi(self) -> float:
        p = math.atan2(self.hy, self.hx)
        return math.pi if p == -math.pi else p

    @property
    def spin_orbit(self) -> tuple[float, float]:
        return (self.hx, self.hy)

    def as_array(self) -> np.ndarray:
        return np.array([self.hx, self.hy, self.hz])


@dataclass(frozen=True)
class PhaseLabel:
    chern: int
    trivial: bool = field(init=False)

    def __post_init__(self):
        object.__setattr__(self, "trivial", self.chern == 0)


def spin_orbit_arrays(kx, ky, t_so: float, variant: str = "standard"):
    """(hx, hy) on arrays of momenta."""
    f = 2.0 if variant == "high_chern" else 1.0
    return t_so * np.sin(f * np.asarray(kx)), t_so * np.sin(f * np.asarray(ky))


def hz_static(kx, ky, m, t0: float):
    """hz without the time-dependent term, on arrays of momenta."""
    return m - t0 * np.cos(kx) - t0 * np.cos(ky)


def field_arrays(params: ModelParams, kx, ky, t: float | None = None, m: float | None = None):
    """Vectorized field.  Either a time ``t`` or an explicit mass ``m``."""
    if m is None:
        if t is None:
            raise ModelError("give either t or m")
        m = params.m_eff(t)
    hx, hy = spin_orbit_arrays(kx, ky, params.t_so, params.variant)
    return hx, hy, hz_static(kx, ky, m, params.t0)


def field_at(params: ModelParams, k: Momentum, t: float) -> FieldVector:
    if params.g != 0 and t <= 0:
        raise ModelError("field undefined at t = 0 for g != 0")
    m = params.m_eff(t) if params.g != 0 else params.m_z
    hx, hy, hz = field_arrays(params, k.kx, k.ky, m=m)
    return FieldVector(float(hx), float(hy), float(hz))


def _boundaries(t0: float, variant: str) -> list[float]:
    if variant == "high_chern":
        return [-2 * t0, -t0, 0.0, t0, 2 * t0]
    return [-2 * t0, 0.0, 2 * t0]


def static_phase(m_eff: float, t0: float = 1.0, variant: str = "standard") -> PhaseLabel:
    for edge in _boundaries(t0, variant):
        if abs(m_eff - edge) < BOUNDARY_TOL:
            raise PhaseBoundaryError(f"m_eff={m_eff} lies on the phase boundary {edge}")
    if abs(m_eff) > 2 * t0:
        return PhaseLabel(0)
    if variant == "high_chern":
        if m_eff > t0:
            return PhaseLabel(-1)
        if m_eff > 0:
            return PhaseLabel(3)
        if m_eff > -t0:
            return PhaseLabel(-3)
        return PhaseLabel(1)
    return PhaseLabel(-1 if m_eff > 0 else 1)


def bz_axis(n: int) -> np.ndarray:
    """Uniform n-point axis over [-pi, pi), endpoint excluded."""
    return -np.pi + 2 * np.pi * np.arange(n) / n


# Sign applied to the raw lattice Berry-flux sum; fixed so that the standard
# model at m_eff = +1 gives C = -1.
CHERN_SIGN = -1

FLUX_LIMIT = np.pi / 2


def _lower_band_vectors(hx, hy, hz):
    """Lower-band eigenvectors of h.sigma, shape (..., 2), any smooth-enough gauge."""
    e = np.sqrt(hx**2 + hy**2 + hz**2)
    # two gauges, pick the better conditioned one per point
    u1 = np.stack([(e - hz) + 0j, -(hx + 1j * hy)], axis=-1)
    u2 = np.stack([hx - 1j * hy, -(e + hz) + 0j], axis=-1)
    n1 = np.linalg.norm(u1, axis=-1)
    n2 = np.linalg.norm(u2, axis=-1)
    use1 = (n1 >= n2)[..., None]
    u = np.where(use1, u1 / np.where(n1 == 0, 1, n1)[..., None], u2 / np.where(n2 == 0, 1, n2)[..., None])
    return u, e


def chern_fukui(m_eff: float, params: ModelParams, grid_n: int = 60) -> int:
    """Lower-band Chern number by the lattice link-variable (plaquette flux) method."""
    if grid_n < 20:
        raise ModelError("grid_n must be >= 20")
    static_phase(m_eff, params.t0, params.variant)  # boundary check
    ks = bz_axis(grid_n)
    kx, ky = np.meshgrid(ks, ks, indexing="ij")
    hx, hy, hz = field_arrays(params, kx, ky, m=m_eff)
    u, e = _lower_band_vectors(hx, hy, hz)
    if np.any(e == 0):
        raise GaplessError("gap closes on the sampling grid")
    ux = np.sum(np.conj(u) * np.roll(u, -1, axis=0), axis=-1)
    uy = np.sum(np.conj(u) * np.roll(u, -1, axis=1), axis=-1)
    ux /= np.abs(ux)
    uy /= np.abs(uy)
    flux = np.angle(ux * np.roll(uy, -1, axis=0) * np.conj(np.roll(ux, -1, axis=1)) * np.conj(uy))
    if np.max(np.abs(flux)) > FLUX_LIMIT:
        raise ChernConvergenceError(
            f"plaquette flux {np.max(np.abs(flux)):.3f} exceeds {FLUX_LIMIT:.3f}; refine the grid")
    raw = flux.sum() / (2 * np.pi)
    return CHERN_SIGN * int(round(raw))
