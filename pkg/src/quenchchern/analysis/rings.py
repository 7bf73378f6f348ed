"""Ring classification (BIS / FSIS / ISIS) and dynamical-field windings."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Literal

import numpy as np

from ..dynamics import TaspGrid
from ..model import field_arrays, spin_orbit_arrays
from .contours import (
    Contour,
    bilinear,
    extract_zero_contours,
    hidden_sis_contours,
    periodic_hausdorff,
)

RingKind = Literal["BIS", "FSIS", "ISIS"]

SIS_FRACTION = 0.05
AMBIGUITY_FRACTION = 0.10
WINDING_RESIDUAL = 0.1
MIN_FIELD = 1e-4

# Invariant = WINDING_SIGN * (winding of the dynamical field along the ring
# in its stored orientation).  Fixed so the trivial -> C = -1 quench reads -1.
WINDING_SIGN = -1


class WindingError(ValueError):
    pass


class DegenerateFieldError(WindingError):
    pass


class QuantizationError(WindingError):
    pass


@dataclass
class Ring:
    """A classified zero ring of sz.

    ``points`` are unwrapped momenta.  BIS and ISIS are ordered with sz > 0 on
    the left; an FSIS is ordered with the same rotational sense as its BIS,
    since both surround the same charges.  The side on the left is the
    enclosed side for charge counting.
    """

    points: np.ndarray
    kind: RingKind
    mean_inplane: float
    winding: int | None = None
    wrap: tuple[int, int] = (0, 0)
    ambiguous: bool = False
    notes: list[str] = field(default_factory=list)

    @property
    def closed(self) -> bool:
        return self.wrap == (0, 0)

    @property
    def sis_like(self) -> bool:
        return self.kind != "BIS"

    def signed_area(self) -> float:
        x, y = self.points[:, 0], self.points[:, 1]
        return 0.5 * float(np.sum(x * np.roll(y, -1) - np.roll(x, -1) * y))

    def centroid(self) -> np.ndarray:
        c = self.points.mean(axis=0)
        return np.mod(c + np.pi, 2 * np.pi) - np.pi

    def to_dict(self) -> dict:
        return {
            "kind": self.kind,
            "winding": self.winding,
            "mean_inplane": self.mean_inplane,
            "closed": self.closed,
            "wrap": list(self.wrap),
            "ambiguous": self.ambiguous,
            "points": self.points.tolist(),
        }


def inplane_on(grid: TaspGrid, pts: np.ndarray) -> np.ndarray:
    sx = bilinear(grid.sx, pts[:, 0], pts[:, 1])
    sy = bilinear(grid.sy, pts[:, 0], pts[:, 1])
    return np.hypot(sx, sy)


def classify_rings(grid: TaspGrid, contours: list[Contour]) -> list[Ring]:
    """Split sz = 0 contours into BIS and SIS-like rings, then SIS into FSIS / ISIS.

    A contour is SIS-like when its mean in-plane TASP falls below
    ``SIS_FRACTION`` of the largest in-plane magnitude on the grid.  Among
    SIS-like rings the one closest (Hausdorff) to a BIS is the FSIS.
    """
    max_inplane = float(np.hypot(grid.sx, grid.sy).max())
    tau = SIS_FRACTION * max_inplane
    rings = []
    for c in contours:
        m = float(inplane_on(grid, c.points).mean())
        pts = c.points
        if c.source == "polarization" and c.closed:
            pts = _orient_hz_negative_left(grid, pts)
        rings.append(Ring(pts, "BIS" if m >= tau else "ISIS", m, wrap=c.wrap))

    bis = [r for r in rings if r.kind == "BIS"]
    sis = [r for r in rings if r.kind != "BIS"]
    if bis and sis:
        dists = [min(periodic_hausdorff(s.points, b.points) for b in bis) for s in sis]
        order = np.argsort(dists)
        fsis = sis[order[0]]
        fsis.kind = "FSIS"
        partner = min(bis, key=lambda b: periodic_hausdorff(fsis.points, b.points))
        if fsis.closed and partner.closed and (
                np.sign(fsis.signed_area()) != np.sign(partner.signed_area())):
            fsis.points = fsis.points[::-1].copy()
        if len(sis) > 1:
            d0, d1 = dists[order[0]], dists[order[1]]
            if d1 - d0 <= AMBIGUITY_FRACTION * d1:
                for idx in order[:2]:
                    sis[idx].ambiguous = True
                    sis[idx].notes.append("FSIS/ISIS distances within 10%")
    return sort_rings(rings)


def _orient_hz_negative_left(grid: TaspGrid, pts: np.ndarray) -> np.ndarray:
    # a ring hugging an unresolved BIS takes the BIS orientation: hz_f < 0 on the left
    p = grid.params
    m = p.m_z if p.sudden else p.m_final
    nrm = ring_normals(pts)
    right = pts + grid.spacing * nrm
    left = pts - grid.spacing * nrm
    hz_r = field_arrays(p, right[:, 0], right[:, 1], m=m)[2]
    hz_l = field_arrays(p, left[:, 0], left[:, 1], m=m)[2]
    return pts if np.mean(hz_l - hz_r) < 0 else pts[::-1].copy()


def sort_rings(rings: list[Ring]) -> list[Ring]:
    def key(r):
        c = r.centroid()
        return (round(float(np.hypot(*c)), 9), round(float(c[0]), 9), round(float(c[1]), 9))

    return sorted(rings, key=key)


def find_rings(grid: TaspGrid, *, hidden: bool = True) -> list[Ring]:
    """sz = 0 rings, plus SIS rings hidden under a BIS when ``hidden`` is set."""
    contours = extract_zero_contours(grid)
    if hidden:
        contours = contours + hidden_sis_contours(grid, contours)
    return classify_rings(grid, contours)


def winding_of(vectors: np.ndarray, *, closed: bool = True) -> float:
    """Accumulated angle of a 2D vector sequence along a closed path, / 2 pi."""
    ang = np.arctan2(vectors[:, 1], vectors[:, 0])
    if closed:
        ang = np.append(ang, ang[0])
    d = np.diff(ang)
    d = (d + np.pi) % (2 * np.pi) - np.pi
    return float(d.sum() / (2 * np.pi))


def _quantize(raw: float) -> int:
    w = int(round(raw))
    if abs(raw - w) > WINDING_RESIDUAL:
        raise QuantizationError(f"winding {raw:.3f} is not close to an integer")
    return WINDING_SIGN * w


def _require_closed(ring: Ring):
    if not ring.closed:
        raise WindingError("ring does not close under BZ periodicity; winding undefined")


def bis_field(ring: Ring, grid: TaspGrid) -> np.ndarray:
    """Dynamical field (-sx, -sy) sampled along a ring."""
    p = ring.points
    return -np.stack([bilinear(grid.sx, p[:, 0], p[:, 1]), bilinear(grid.sy, p[:, 0], p[:, 1])], axis=1)


def winding_on_bis(ring: Ring, grid: TaspGrid) -> int:
    if ring.kind != "BIS":
        raise WindingError(f"winding_on_bis called on a {ring.kind}")
    _require_closed(ring)
    v = bis_field(ring, grid)
    if np.hypot(v[:, 0], v[:, 1]).min() <= MIN_FIELD:
        raise DegenerateFieldError("dynamical field vanishes on the BIS")
    return _quantize(winding_of(v))


def ring_normals(points: np.ndarray) -> np.ndarray:
    """Unit normals pointing to the right of the direction of travel."""
    fwd = np.roll(points, -1, axis=0) - np.roll(points, 1, axis=0)
    norm = np.hypot(fwd[:, 0], fwd[:, 1])
    if np.any(norm < 1e-12):
        raise WindingError("tangent undefined: duplicate ring points")
    t = fwd / norm[:, None]
    return np.stack([t[:, 1], -t[:, 0]], axis=1)


def sis_gradient(ring: Ring, grid: TaspGrid) -> np.ndarray:
    """(g_x, g_y) = -d/dk_perp (sx, sy) by central differences, step one grid spacing."""
    p = ring.points
    nrm = ring_normals(p)
    h = grid.spacing
    fwd = p + h * nrm
    bwd = p - h * nrm
    gx = -(bilinear(grid.sx, fwd[:, 0], fwd[:, 1]) - bilinear(grid.sx, bwd[:, 0], bwd[:, 1])) / (2 * h)
    gy = -(bilinear(grid.sy, fwd[:, 0], fwd[:, 1]) - bilinear(grid.sy, bwd[:, 0], bwd[:, 1])) / (2 * h)
    return np.stack([gx, gy], axis=1)


def winding_on_sis(ring: Ring, grid: TaspGrid) -> int:
    if ring.kind == "BIS":
        raise WindingError("winding_on_sis called on a BIS")
    _require_closed(ring)
    v = sis_gradient(ring, grid)
    if np.hypot(v[:, 0], v[:, 1]).min() <= MIN_FIELD:
        raise DegenerateFieldError("gradient field vanishes on the SIS")
    return _quantize(winding_of(v))


def annotate_windings(rings: list[Ring], grid: TaspGrid) -> list[Ring]:
    """Fill ``ring.winding`` in place; failures leave it None with a note."""
    for r in rings:
        try:
            r.winding = winding_on_bis(r, grid) if r.kind == "BIS" else winding_on_sis(r, grid)
        except WindingError as exc:
            r.winding = None
            r.notes.append(str(exc))
    return rings


def gradient_alignment(ring: Ring, grid: TaspGrid) -> float:
    """Smallest cosine similarity between the SIS gradient field and h_so along the ring.

    The overall sign is fixed per ring (the one making the mean positive).
    """
    p = grid.params
    v = sis_gradient(ring, grid)
    hx, hy = spin_orbit_arrays(ring.points[:, 0], ring.points[:, 1], p.t_so, p.variant)
    h = np.stack([hx, hy], axis=1)
    cos = np.sum(v * h, axis=1) / (np.hypot(v[:, 0], v[:, 1]) * np.hypot(hx, hy) + 1e-300)
    return float(np.min(np.sign(cos.mean()) * cos))
