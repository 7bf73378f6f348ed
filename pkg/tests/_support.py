"""Shared test fixtures: figure parameter sets, cached grids, acceptance log."""

from __future__ import annotations

from functools import lru_cache

from quenchchern.analysis.rings import annotate_windings, find_rings
from quenchchern.dynamics import tasp_grid
from quenchchern.model import ModelParams

CASES = {
    # trivial limit -> C = -1
    "fig1": ModelParams(m_z=1.0, g=1.0, t_int=0.0),
    # trivial limit -> C = +1
    "fig2": ModelParams(m_z=-1.0, g=1.0, t_int=0.0),
    # C = +1 -> trivial
    "fig3b": ModelParams(m_z=-4.0, g=1.0, t_int=1 / 3),
    # C = -1 -> C = +1
    "fig3c": ModelParams(m_z=-1.0, g=1.0, t_int=0.5),
    # C = +1 -> C = -1 under -g/t
    "fig3d": ModelParams(m_z=1.0, g=1.0, t_int=0.5, protocol_sign=-1),
    # high-Chern variant, C = -1 -> C = 3
    "fig8": ModelParams(m_z=0.5, g=1.0, t_int=1.0, variant="high_chern"),
    # trivial (m_eff = 20) -> C = +1, slow and sudden
    "slow_b": ModelParams(m_z=-1.0, g=1.0, t_int=1 / 21),
    "sudden_b": ModelParams(m_z=-1.0, g=0.0, m_z_int=20.0),
    # C = +1 (m_eff = -1) -> trivial (m_z = -10), slow and sudden
    "slow_c": ModelParams(m_z=-10.0, g=1.0, t_int=1 / 9),
    "sudden_c": ModelParams(m_z=-10.0, g=0.0, m_z_int=-1.0),
}


@lru_cache(maxsize=None)
def grid(name: str, n: int):
    return tasp_grid(CASES[name], n)


@lru_cache(maxsize=None)
def rings(name: str, n: int):
    g = grid(name, n)
    return annotate_windings(find_rings(g), g)


def kinds(rs) -> list[str]:
    return sorted(r.kind for r in rs)


def winding_of_kind(rs, kind: str) -> int | None:
    ws = [r.winding for r in rs if r.kind == kind]
    assert len(ws) == 1, f"expected one {kind}, got {len(ws)}"
    return ws[0]


# criterion id -> (passed, detail); printed by the terminal-summary hook
ACCEPTANCE: dict[int, tuple[bool, str]] = {}
