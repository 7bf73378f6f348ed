import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from quenchchern.analysis.contours import (
    bilinear,
    extract_zero_contours,
    periodic_hausdorff,
    periodic_zero_contours,
    window_pieces,
)
from quenchchern.dynamics import tasp_grid
from quenchchern.model import ModelParams, bz_axis


def sampled(fun, n):
    ks = bz_axis(n)
    kx, ky = np.meshgrid(ks, ks, indexing="ij")
    return fun(kx, ky)


def torus_dist(kx, ky, cx, cy):
    dx = (kx - cx + np.pi) % (2 * np.pi) - np.pi
    dy = (ky - cy + np.pi) % (2 * np.pi) - np.pi
    return np.hypot(dx, dy)


class TestMarchingSquares:
    def test_circle(self):
        f = sampled(lambda x, y: np.hypot(x, y) - 1.0, 81)
        (c,) = periodic_zero_contours(f)
        assert c.closed
        r = np.hypot(c.points[:, 0], c.points[:, 1])
        assert np.abs(r - 1).max() < 0.01
        assert c.length() == pytest.approx(2 * math.pi, rel=0.01)
        # positive side (outside) on the left: clockwise travel
        assert c.signed_area() == pytest.approx(-math.pi, rel=0.01)

    def test_orientation_flips_with_sign(self):
        f = sampled(lambda x, y: 1.0 - np.hypot(x, y), 81)
        (c,) = periodic_zero_contours(f)
        assert c.signed_area() > 0

    def test_circle_across_boundary_is_stitched(self):
        f = sampled(lambda x, y: torus_dist(x, y, math.pi, 0.3) - 1.0, 81)
        (c,) = periodic_zero_contours(f)
        assert c.closed
        assert window_pieces(c.points) == 2
        assert c.length() == pytest.approx(2 * math.pi, rel=0.01)

    def test_corner_circle_four_pieces(self):
        f = sampled(lambda x, y: torus_dist(x, y, math.pi, math.pi) - 1.0, 80)
        (c,) = periodic_zero_contours(f)
        assert c.closed and window_pieces(c.points) == 4

    def test_non_contractible_lines(self):
        f = sampled(lambda x, y: np.cos(x + 0.1), 64)
        cs = periodic_zero_contours(f)
        assert len(cs) == 2
        assert sorted(abs(c.wrap[1]) for c in cs) == [1, 1]
        assert all(not c.closed and c.wrap[0] == 0 for c in cs)

    def test_saddle_resolved_by_centre(self):
        # checkerboard-like cell; centre value decides connectivity, no error
        f = sampled(lambda x, y: np.cos(x) * np.cos(y) + 0.05, 41)
        cs = periodic_zero_contours(f)
        assert cs and all(len(c.points) >= 4 for c in cs)

    def test_noise_filter(self):
        f = sampled(lambda x, y: np.hypot(x, y) - 0.04, 80)  # origin is a node on even grids
        assert periodic_zero_contours(f) == []
        assert len(periodic_zero_contours(f, min_length=0.0)) == 1

    def test_constant_sign(self):
        assert periodic_zero_contours(np.ones((50, 50))) == []

    def test_non_square(self):
        with pytest.raises(ValueError):
            periodic_zero_contours(np.ones((4, 5)))

    @settings(max_examples=25, deadline=None)
    @given(st.floats(-3, 3), st.floats(-3, 3), st.floats(0.5, 2.0))
    def test_random_circles(self, cx, cy, r):
        f = sampled(lambda x, y: torus_dist(x, y, cx, cy) - r, 61)
        (c,) = periodic_zero_contours(f)
        assert c.closed
        d = torus_dist(c.points[:, 0], c.points[:, 1], cx, cy)
        assert np.abs(d - r).max() < 0.02
        # consecutive points closer than two grid spacings
        step = np.hypot(*np.diff(np.vstack([c.points, c.points[:1]]), axis=0).T)
        assert step.max() < 2 * 2 * math.pi / 61


class TestHelpers:
    def test_bilinear_exact_on_nodes_and_linear(self):
        ks = bz_axis(40)
        kx, ky = np.meshgrid(ks, ks, indexing="ij")
        f = np.sin(kx) + 2 * np.cos(ky)
        assert bilinear(f, ks[5], ks[7]) == pytest.approx(f[5, 7])
        mid = bilinear(f, 0.5 * (ks[5] + ks[6]), ks[7])
        assert mid == pytest.approx(0.5 * (f[5, 7] + f[6, 7]))
        # periodic wrap
        assert bilinear(f, ks[5] + 2 * math.pi, ks[7] - 4 * math.pi) == pytest.approx(f[5, 7])

    def test_hausdorff(self):
        a = np.array([[0.0, 0.0], [1.0, 0.0]])
        assert periodic_hausdorff(a, a) == 0
        assert periodic_hausdorff(a, a + [0, 0.5]) == pytest.approx(0.5)
        # distance measured across the BZ boundary
        b = np.array([[-3.1, 0.0]])
        c = np.array([[3.1, 0.0]])
        assert periodic_hausdorff(b, c) == pytest.approx(2 * math.pi - 6.2)


class TestOnTasp:
    def test_trivial_to_trivial_has_no_rings(self):
        g = tasp_grid(ModelParams(m_z=3.0, g=1.0, t_int=1.0), 61)
        assert extract_zero_contours(g) == []

    def test_needs_resolution(self):
        g = tasp_grid(ModelParams(m_z=3.0, g=1.0, t_int=1.0), 21)
        with pytest.raises(ValueError):
            extract_zero_contours(g)
