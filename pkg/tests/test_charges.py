import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from _support import CASES, rings
from quenchchern.analysis.charges import (
    ChargeBoundaryError,
    charge_locations,
    enclosed_charge,
    inside_polygon,
    local_charge,
    topological_charges,
)
from quenchchern.analysis.rings import Ring
from quenchchern.model import ModelError, ModelParams, Momentum

STD = ModelParams()
HC = ModelParams(variant="high_chern")


def square(cx, cy, half, ccw=True):
    p = np.array([[-1, -1], [1, -1], [1, 1], [-1, 1]], float) * half + [cx, cy]
    # densify so polyline distance is meaningful
    p = np.concatenate([np.linspace(p[i], p[(i + 1) % 4], 20, endpoint=False) for i in range(4)])
    return p if ccw else p[::-1]


class TestCharges:
    def test_standard_values(self):
        vals = {(round(q.kx, 6), round(q.ky, 6)): local_charge(STD, q) for q in charge_locations()}
        pi = round(-math.pi, 6)
        assert vals == {(pi, pi): -1, (pi, 0.0): 1, (0.0, pi): 1, (0.0, 0.0): -1}

    def test_high_chern_locations_and_total(self):
        locs = charge_locations("high_chern")
        assert len(locs) == 16
        rep = topological_charges(HC)
        assert rep.total == 0
        assert sorted(abs(q) for _, q in rep.charges) == [1] * 16

    def test_total_vanishes(self):
        assert topological_charges(STD).total == 0

    def test_charge_independent_of_radius_and_tso(self):
        for r in (0.05, 0.1, 0.5):
            for t in (0.1, 1.0, 3.0):
                assert local_charge(ModelParams(t_so=t), Momentum(0, 0), r) == -1

    def test_requires_spin_orbit(self):
        with pytest.raises(ModelError):
            topological_charges(ModelParams(t_so=0.0))

    def test_report_dict(self):
        d = topological_charges(STD).to_dict()
        assert len(d["charges"]) == 4 and d["per_ring_enclosed"] == {}


class TestEnclosure:
    def test_counter_clockwise_encloses_interior(self):
        charges = topological_charges(STD).charges
        r = Ring(square(0, 0, 1.0), "BIS", 0.5)
        assert enclosed_charge(r, charges, 0.03) == -1

    def test_clockwise_encloses_exterior(self):
        charges = topological_charges(STD).charges
        r = Ring(square(0, 0, 1.0, ccw=False), "BIS", 0.5)
        assert enclosed_charge(r, charges, 0.03) == 1

    def test_periodic_image_counted(self):
        charges = topological_charges(STD).charges
        # square around (pi, pi) drawn across the BZ edge
        r = Ring(square(math.pi, math.pi, 0.8), "BIS", 0.5)
        assert enclosed_charge(r, charges, 0.03) == -1

    def test_boundary_error(self):
        charges = topological_charges(STD).charges
        r = Ring(square(0.0, 0.0, 0.01), "BIS", 0.5)
        with pytest.raises(ChargeBoundaryError):
            enclosed_charge(r, charges, 0.03)

    @pytest.mark.parametrize("name", ["fig1", "fig2", "fig3b", "fig3c", "fig3d", "fig8"])
    def test_duality_with_windings(self, name):
        rs = rings(name, 121)
        rep = topological_charges(CASES[name], rs, 2 * math.pi / 121)
        for i, r in enumerate(rs):
            assert rep.per_ring_enclosed[i] == r.winding, (r.kind, r.winding)


class TestInsidePolygon:
    @settings(max_examples=60, deadline=None)
    @given(st.floats(-2, 2), st.floats(-2, 2), st.floats(0.2, 1.5),
           st.floats(-3, 3), st.floats(-3, 3))
    def test_disc(self, cx, cy, r, px, py):
        a = np.linspace(0, 2 * np.pi, 400, endpoint=False)
        poly = np.stack([cx + r * np.cos(a), cy + r * np.sin(a)], axis=1)
        d = math.hypot(px - cx, py - cy)
        if abs(d - r) < 0.01:
            return
        assert inside_polygon(poly, np.array([[px, py]]))[0] == (d < r)

    def test_orientation_irrelevant(self):
        poly = square(0, 0, 1)
        pts = np.array([[0.0, 0.0], [2.0, 0.0]])
        assert inside_polygon(poly, pts).tolist() == inside_polygon(poly[::-1], pts).tolist() == [True, False]
