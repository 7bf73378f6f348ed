"""Zero-level contours of scalar fields sampled on the periodic BZ grid."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..dynamics import TaspGrid
from ..model import field_arrays

MIN_LENGTH = 4.0  # contours shorter than this many grid spacings are noise


@dataclass
class Contour:
    """Closed polyline in unwrapped k coordinates.

    Points are ordered with the positive side of the contoured field on the
    left.  The last point is not repeated.  ``wrap`` counts how many times the
    curve winds around the torus in (x, y); (0, 0) means contractible.
    """

    points: np.ndarray
    wrap: tuple[int, int] = (0, 0)
    source: str = "sz"

    @property
    def closed(self) -> bool:
        return self.wrap == (0, 0)

    @property
    def n_segments(self) -> int:
        return len(self.points)

    def length(self) -> float:
        d = np.diff(np.vstack([self.points, self.points[:1]]), axis=0)
        if not self.closed:
            d = d[:-1]
        return float(np.hypot(d[:, 0], d[:, 1]).sum())

    def signed_area(self) -> float:
        x, y = self.points[:, 0], self.points[:, 1]
        return 0.5 * float(np.sum(x * np.roll(y, -1) - np.roll(x, -1) * y))

    def centroid(self) -> np.ndarray:
        return self.points.mean(axis=0)


def _edge_point(f, kind, i, j, n):
    """Crossing position on an edge, in (unwrapped-later) index units."""
    if kind == 0:  # horizontal edge (i, j) -> (i + 1, j)
        a, b = f[i, j], f[(i + 1) % n, j]
        return np.array([i + a / (a - b), float(j)])
    a, b = f[i, j], f[i, (j + 1) % n]  # vertical edge (i, j) -> (i, j + 1)
    return np.array([float(i), j + a / (a - b)])


def periodic_zero_contours(f: np.ndarray, min_length: float = MIN_LENGTH) -> list[Contour]:
    """Marching squares on a periodic grid; f[i, j] sampled at (ks[i], ks[j]).

    Saddle cells are resolved by the bilinear centre value (corner mean).
    Returns contours in k units (lattice origin at -pi).
    """
    n = f.shape[0]
    if f.shape != (n, n):
        raise ValueError("field must be square")
    pos = f > 0
    p00 = pos
    p10 = np.roll(pos, -1, axis=0)
    p11 = np.roll(p10, -1, axis=1)
    p01 = np.roll(pos, -1, axis=1)
    mixed = ~((p00 == p10) & (p10 == p11) & (p11 == p01))
    centre = 0.25 * (f + np.roll(f, -1, 0) + np.roll(np.roll(f, -1, 0), -1, 1) + np.roll(f, -1, 1))

    nxt: dict[tuple, tuple] = {}
    for i, j in zip(*np.nonzero(mixed)):
        i1, j1 = (i + 1) % n, (j + 1) % n
        # cell edges walked counter-clockwise: bottom, right, top, left
        edges = [(0, i, j), (1, i1, j), (0, i, j1), (1, i, j)]
        corners = [p00[i, j], p10[i, j], p11[i, j], p01[i, j]]
        starts, ends = [], []
        for e in range(4):
            a, b = corners[e], corners[(e + 1) % 4]
            if a and not b:
                starts.append(e)
            elif b and not a:
                ends.append(e)
        if len(starts) == 1:
            nxt[edges[starts[0]]] = edges[ends[0]]
        else:
            # saddle: corners alternate, starts are (0, 2) or (1, 3)
            s0, s1 = starts
            if centre[i, j] > 0:
                # positive region connected through the centre: cut off the negative corners
                pairs = [(s0, (s0 + 1) % 4), (s1, (s1 + 1) % 4)]
            else:
                pairs = [(s0, (s0 + 3) % 4), (s1, (s1 + 3) % 4)]
            for s, e in pairs:
                nxt[edges[s]] = edges[e]

    h = 2 * np.pi / n
    contours = []
    seen = set()
    for start in list(nxt):
        if start in seen:
            continue
        pts = []
        e = start
        prev = None
        while True:
            seen.add(e)
            p = _edge_point(f, e[0], e[1], e[2], n)
            if prev is not None:
                p = p - n * np.round((p - prev) / n)
            pts.append(p)
            prev = p
            e = nxt[e]
            if e == start:
                break
        pts = np.array(pts)
        p0 = _edge_point(f, start[0], start[1], start[2], n)
        closing = prev + (p0 - prev) - n * np.round((p0 - prev) / n)
        wrap_xy = np.round((closing - pts[0]) / n).astype(int)
        c = Contour(-np.pi + h * pts, (int(wrap_xy[0]), int(wrap_xy[1])))
        if c.length() / h < min_length:
            continue
        contours.append(c)
    return contours


def extract_zero_contours(grid: TaspGrid, min_length: float = MIN_LENGTH) -> list[Contour]:
    """Closed sz = 0 contours of a TASP grid."""
    if grid.grid_n < 41:
        raise ValueError("contour extraction needs grid_n >= 41")
    return periodic_zero_contours(grid.sz, min_length)


def signed_polarization(grid: TaspGrid) -> np.ndarray:
    """P_u - P_d recovered from the TASP as its projection on the final field."""
    p = grid.params
    kx, ky = np.meshgrid(grid.ks, grid.ks, indexing="ij")
    m = p.m_z if p.sudden else p.m_final
    h = np.stack(field_arrays(p, kx, ky, m=m), axis=-1)
    return np.sum(grid.data * h, axis=-1) / np.linalg.norm(h, axis=-1)


def hidden_sis_contours(grid: TaspGrid, known: list[Contour], min_length: float = MIN_LENGTH,
                        match: float = 2.0) -> list[Contour]:
    """P_u - P_d = 0 contours that the sz = 0 level set does not resolve.

    When an SIS runs closer than a grid spacing to a BIS, sz has an
    unresolved double zero there and no sign change survives sampling.  The
    signed polarization still changes sign, so its zero contours are kept
    unless an sz contour already lies within ``match`` grid spacings.
    """
    out = []
    for c in periodic_zero_contours(signed_polarization(grid), min_length):
        if any(periodic_hausdorff(c.points, k.points) < match * grid.spacing for k in known):
            continue
        c.source = "polarization"
        out.append(c)
    return out


def window_pieces(points: np.ndarray) -> int:
    """Number of pieces a closed contour is cut into by the edges of the [-pi, pi)^2 window."""
    cell = np.floor((points + np.pi) / (2 * np.pi)).astype(int)
    cuts = int(np.sum(np.any(cell != np.roll(cell, -1, axis=0), axis=1)))
    return max(cuts, 1)


def bilinear(f: np.ndarray, kx, ky) -> np.ndarray:
    """Periodic bilinear interpolation of f[i, j] sampled on the BZ grid."""
    n = f.shape[0]
    h = 2 * np.pi / n
    u = (np.asarray(kx) + np.pi) / h
    v = (np.asarray(ky) + np.pi) / h
    i0 = np.floor(u).astype(int)
    j0 = np.floor(v).astype(int)
    du = u - i0
    dv = v - j0
    i0 %= n
    j0 %= n
    i1 = (i0 + 1) % n
    j1 = (j0 + 1) % n
    return ((1 - du) * (1 - dv) * f[i0, j0] + du * (1 - dv) * f[i1, j0]
            + (1 - du) * dv * f[i0, j1] + du * dv * f[i1, j1])


def periodic_hausdorff(a: np.ndarray, b: np.ndarray) -> float:
    """Symmetric Hausdorff distance between two point sets on the 2*pi torus."""
    d = a[:, None, :] - b[None, :, :]
    d = d - 2 * np.pi * np.round(d / (2 * np.pi))
    dist = np.hypot(d[..., 0], d[..., 1])
    return float(max(dist.min(axis=1).max(), dist.min(axis=0).max()))
