"""Parameter sweeps: ring positions along the BZ diagonal versus g, ring patterns versus t_so."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import brentq

from ..dynamics import EvolutionError, polarization_grid, tasp_grid
from ..model import ModelError, ModelParams, bz_axis, hz_static
from .contours import window_pieces
from .process import classify_process
from .rings import annotate_windings, find_rings

LINE_N = 401


@dataclass
class Crossing:
    k: float
    kind: str


@dataclass
class GSweepRow:
    """sz = 0 crossings on the diagonal kx = ky = k at one value of g."""

    g: float
    t_int: float
    crossings: list[Crossing] = field(default_factory=list)
    grid_kinds: list[str] | None = None
    error: str | None = None

    def positions(self, kind: str, positive: bool = True) -> list[float]:
        return [c.k for c in self.crossings if c.kind == kind and (c.k > 0 or not positive)]

    def fsis_isis_separation(self) -> float | None:
        """Gap between the FSIS and ISIS crossings on k > 0.

        Zero when both have disappeared from the line, i.e. the two surfaces
        have met and annihilated; None when only one of them is present.
        """
        f, i = self.positions("FSIS"), self.positions("ISIS")
        if f and i:
            return float(min(abs(a - b) for a in f for b in i))
        if not f and not i and self.positions("BIS"):
            return 0.0
        return None

    def to_dict(self) -> dict:
        return {
            "g": self.g,
            "t_int": self.t_int,
            "crossings": [{"k": c.k, "kind": c.kind} for c in self.crossings],
            "grid_kinds": self.grid_kinds,
            "error": self.error,
        }


def _zeros(k: np.ndarray, v: np.ndarray) -> list[float]:
    """Linear-interpolated sign changes of a periodic sampled function."""
    out = []
    n = len(k)
    h = 2 * np.pi / n
    for i in range(n):
        a, b = v[i], v[(i + 1) % n]
        if a == 0:
            out.append(float(k[i]))
        elif a * b < 0:
            out.append(float(k[i] + h * a / (a - b)))
    return out


def diagonal_crossings(params: ModelParams, n_line: int = LINE_N, **kw) -> list[Crossing]:
    """sz = 0 points on kx = ky, split into BIS (hz_f = 0) and SIS (P_u - P_d = 0).

    sz is the product of the two factors over eps_f, so its zero set on the
    line is the union of the two zero sets; locating them separately keeps a
    BIS and a nearly coincident SIS apart.  An SIS crossing is an FSIS when it
    is the SIS crossing closest to some BIS crossing, otherwise an ISIS.
    """
    k = bz_axis(n_line)
    pol = polarization_grid(params, k, k, **kw)
    m_f = params.m_z if params.sudden else params.m_final

    def hz(x):
        return hz_static(x, x, m_f, params.t0)

    bis = []
    for x in _zeros(k, hz(k)):
        h = 2 * np.pi / n_line
        lo, hi = x - h, x + h
        bis.append(brentq(hz, lo, hi, xtol=1e-13) if hz(lo) * hz(hi) < 0 else x)
    sis = _zeros(k, pol)

    def dist(a, b):
        d = abs(a - b) % (2 * np.pi)
        return min(d, 2 * np.pi - d)

    fsis = set()
    if sis:
        for b in bis:
            fsis.add(min(range(len(sis)), key=lambda j: dist(sis[j], b)))
    out = [Crossing(float(b), "BIS") for b in bis]
    out += [Crossing(float(s), "FSIS" if (j in fsis and bis) else "ISIS") for j, s in enumerate(sis)]
    return sorted(out, key=lambda c: c.k)


def initial_time_for_mass(params: ModelParams, g: float, m_initial: float) -> float:
    """t_int giving s*g/t_int + m_z = m_initial."""
    d = m_initial - params.m_z
    if d == 0 or np.sign(d) != params.protocol_sign:
        raise ModelError(f"no t_int > 0 reaches m_eff = {m_initial} from m_z = {params.m_z}")
    return params.protocol_sign * g / d


def sweep_g(params_base: ModelParams, g_values, *, m_initial: float | None = None,
            n_line: int = LINE_N, coarse_n: int | None = None, **kw) -> list[GSweepRow]:
    """Diagonal ring positions for each g.

    With ``m_initial`` set, t_int is re-chosen for every g so the initial
    Hamiltonian stays fixed.  With ``coarse_n`` the full-grid ring kinds at
    that resolution are recorded alongside as a cross-check.  Errors are
    recorded per row and the sweep continues.
    """
    g_values = list(g_values)
    if not g_values:
        raise ValueError("empty g list")
    rows = []
    for g in g_values:
        row = GSweepRow(float(g), params_base.t_int)
        try:
            t_int = initial_time_for_mass(params_base, g, m_initial) if m_initial is not None \
                else params_base.t_int
            row.t_int = t_int
            p = params_base.replace(g=float(g), t_int=t_int)
            row.crossings = diagonal_crossings(p, n_line, **kw)
            if coarse_n:
                row.grid_kinds = [r.kind for r in find_rings(tasp_grid(p, coarse_n, **kw))]
        except (ModelError, EvolutionError, ValueError) as exc:
            row.error = f"{type(exc).__name__}: {exc}"
        rows.append(row)
    return rows


@dataclass
class TsoSweepRow:
    t_so: float
    n_rings: int | None = None
    n_pieces: int | None = None
    kinds: list[str] | None = None
    windings: list[int | None] | None = None
    label: str | None = None
    unclassifiable: bool = False
    error: str | None = None

    @property
    def signature(self) -> tuple[int, int] | None:
        """(rings on the torus, contour pieces inside the displayed BZ window)."""
        if self.n_rings is None:
            return None
        return (self.n_rings, self.n_pieces)

    def to_dict(self) -> dict:
        return dict(self.__dict__)


def sweep_tso(params_base: ModelParams, tso_values, grid_n: int = 81, **kw) -> list[TsoSweepRow]:
    """Ring count, kinds, windings and process label for each t_so.

    When the SIS rings move from around k = 0 and (pi, pi) to around (0, pi)
    and (pi, 0), the torus ring count is unchanged but the number of pieces
    seen in the BZ window changes; ``signature`` records both.
    """
    tso_values = list(tso_values)
    if not tso_values:
        raise ValueError("empty t_so list")
    rows = []
    for t in tso_values:
        row = TsoSweepRow(float(t))
        try:
            grid = tasp_grid(params_base.replace(t_so=float(t)), grid_n, **kw)
            rings = annotate_windings(find_rings(grid), grid)
            proc = classify_process(rings)
            row.n_rings = len(rings)
            row.n_pieces = sum(window_pieces(r.points) for r in rings)
            row.kinds = [r.kind for r in rings]
            row.windings = [r.winding for r in rings]
            row.label = proc.label
            row.unclassifiable = proc.unclassifiable
        except (ModelError, EvolutionError, ValueError) as exc:
            row.error = f"{type(exc).__name__}: {exc}"
        rows.append(row)
    return rows
