"""Topological charges: zeros of the spin-orbit field and their enclosure by rings."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from ..model import ModelError, ModelParams, Momentum, spin_orbit_arrays
from .rings import Ring, winding_of

CHARGE_RADIUS = 0.1
CIRCLE_POINTS = 64

# charge = CHARGE_SIGN * (counter-clockwise winding of h_so around the zero);
# fixed so the zero at k = 0 of the standard model carries -1
CHARGE_SIGN = -1


class ChargeBoundaryError(ModelError):
    """A charge sits too close to a ring for the enclosure to be meaningful."""


@dataclass
class ChargeReport:
    """Charges of h_so and, per ring index, the charge sum on the ring's enclosed side."""

    charges: list[tuple[Momentum, int]]
    per_ring_enclosed: dict[int, int | None] = field(default_factory=dict)

    @property
    def total(self) -> int:
        return sum(q for _, q in self.charges)

    def to_dict(self) -> dict:
        return {
            "charges": [{"kx": m.kx, "ky": m.ky, "charge": q} for m, q in self.charges],
            "per_ring_enclosed": {str(i): v for i, v in self.per_ring_enclosed.items()},
        }


def charge_locations(variant: str = "standard") -> list[Momentum]:
    """Zeros of (sin f kx, sin f ky) in the BZ, f = 1 or 2."""
    f = 2 if variant == "high_chern" else 1
    axis = [-np.pi + j * np.pi / f for j in range(2 * f)]
    return [Momentum(x, y) for x in axis for y in axis]


def local_charge(params: ModelParams, q: Momentum, radius: float = CHARGE_RADIUS) -> int:
    a = np.linspace(0, 2 * np.pi, CIRCLE_POINTS, endpoint=False)
    hx, hy = spin_orbit_arrays(q.kx + radius * np.cos(a), q.ky + radius * np.sin(a),
                               params.t_so, params.variant)
    return CHARGE_SIGN * int(round(winding_of(np.stack([hx, hy], axis=1))))


def inside_polygon(poly: np.ndarray, pts: np.ndarray) -> np.ndarray:
    """Even-odd test of pts (m, 2) against a closed polygon (n, 2)."""
    x0, y0 = poly[:, 0], poly[:, 1]
    x1, y1 = np.roll(x0, -1), np.roll(y0, -1)
    px = pts[:, 0][:, None]
    py = pts[:, 1][:, None]
    straddle = (y0 > py) != (y1 > py)
    with np.errstate(divide="ignore", invalid="ignore"):
        xc = x0 + (py - y0) * (x1 - x0) / (y1 - y0)
    return np.sum(straddle & (px < xc), axis=1) % 2 == 1


def distance_to_polyline(poly: np.ndarray, p: np.ndarray) -> float:
    a = poly
    b = np.roll(poly, -1, axis=0)
    ab = b - a
    t = np.clip(np.sum((p - a) * ab, axis=1) / np.maximum(np.sum(ab * ab, axis=1), 1e-300), 0, 1)
    d = a + t[:, None] * ab - p
    return float(np.hypot(d[:, 0], d[:, 1]).min())


def _images(q: Momentum, reach: int = 2) -> np.ndarray:
    s = 2 * np.pi * np.arange(-reach, reach + 1)
    dx, dy = np.meshgrid(s, s, indexing="ij")
    return np.stack([q.kx + dx.ravel(), q.ky + dy.ravel()], axis=1)


def enclosed_charge(ring: Ring, charges: list[tuple[Momentum, int]], spacing: float) -> int:
    """Charge sum on the left of the ring's travel direction.

    For a counter-clockwise ring that is the interior; for a clockwise ring
    it is the exterior, whose sum is the total minus the interior.
    """
    if not ring.closed:
        raise ModelError("ring does not close under BZ periodicity")
    interior = 0
    for q, c in charges:
        imgs = _images(q)
        for p in imgs:
            if distance_to_polyline(ring.points, p) < spacing:
                raise ChargeBoundaryError(
                    f"charge at ({q.kx:.3f}, {q.ky:.3f}) within one grid spacing of a {ring.kind}")
        interior += c * int(inside_polygon(ring.points, imgs).sum())
    if ring.signed_area() > 0:
        return interior
    return sum(c for _, c in charges) - interior


def topological_charges(params: ModelParams, rings: list[Ring] | None = None,
                        spacing: float = 2 * np.pi / 201) -> ChargeReport:
    if not params.t_so > 0:
        raise ModelError("charges need t_so > 0")
    charges = [(q, local_charge(params, q)) for q in charge_locations(params.variant)]
    report = ChargeReport(charges)
    for i, r in enumerate(rings or []):
        report.per_ring_enclosed[i] = enclosed_charge(r, charges, spacing) if r.closed else None
    return report
