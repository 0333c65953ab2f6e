"""Resistor-network statistic: Ohm's-law and series-parallel goldens on
hand-built graphs, symmetry invariance, and failure modes.

Manual graphs use the Triangulation constructor directly with explicit
edges (no triangles), which the resistance code never needs.
"""

import numpy as np
import pytest

from ppsc.errors import NumericalError
from ppsc.geometry import Realization, Window
from ppsc.resistance import (
    ResistanceSummary,
    effective_resistance,
    resistance_summary,
)
from ppsc.simulate import SsiParams, simulate_ssi
from ppsc.triangulate import Triangulation, delaunay


def graph(vertices, edges) -> Triangulation:
    return Triangulation(
        np.asarray(vertices, dtype=float),
        np.empty((0, 3), dtype=np.int64),
        np.asarray(edges, dtype=np.int64),
    )


class TestSingleEdge:
    def test_resistance_is_length(self):
        # One edge of length 3 whose endpoints sit in opposite bands.
        t = graph([(0.5, 2.0), (3.5, 2.0)], [(0, 1)])
        r = effective_resistance(t, Window(0, 0, 4, 4), "x", band=1.0)
        assert r == pytest.approx(3.0, rel=1e-12)

    def test_edge_inside_band_is_short_circuited(self):
        # An extra dangling edge entirely inside the source band carries
        # no current and cannot change the answer.
        t = graph([(0.5, 2.0), (3.5, 2.0), (0.2, 2.5)], [(0, 1), (0, 2)])
        r = effective_resistance(t, Window(0, 0, 4, 4), "x", band=1.0)
        assert r == pytest.approx(3.0, rel=1e-12)


class TestSeriesParallel:
    def test_two_parallel_paths(self):
        # Two disjoint 2-edge unit-length paths: 2 and 2 in parallel -> 1.
        verts = [(0.1, 1.0), (1.1, 1.0), (2.1, 1.0), (0.1, 3.0), (1.1, 3.0), (2.1, 3.0)]
        t = graph(verts, [(0, 1), (1, 2), (3, 4), (4, 5)])
        r = effective_resistance(t, Window(0, 0, 2.2, 4.0), "x", band=0.25)
        assert r == pytest.approx(1.0, rel=1e-12)

    def test_rectangle_loop_anisotropy(self):
        # Loop on a 4 x 2 rectangle (binary-exact coordinates): along x the
        # two length-4 sides act in parallel (R = 2), along y the two
        # length-2 sides do (R = 1).
        verts = [(0.125, 0.125), (4.125, 0.125), (4.125, 2.125), (0.125, 2.125)]
        t = graph(verts, [(0, 1), (1, 2), (2, 3), (0, 3)])
        w = Window(0, 0, 4.25, 2.25)
        s = resistance_summary(t, w, band=0.25)
        assert s.r_horizontal == pytest.approx(2.0, rel=1e-12)
        assert s.r_vertical == pytest.approx(1.0, rel=1e-12)
        assert s.anisotropy == pytest.approx(2.0, rel=1e-12)


class TestSymmetry:
    def test_half_turn_invariance(self):
        # Rotating the pattern by pi about the window centre swaps the two
        # electrode bands, which cannot change a two-point resistance.
        w = Window(0, 0, 10, 10)
        r = simulate_ssi(w, SsiParams(1.0, 60, 20_000), 101)
        rot = Realization(
            np.column_stack([10.0 - r.points[:, 0], 10.0 - r.points[:, 1]]), w
        )
        s1 = resistance_summary(delaunay(r), w, band=2.0)
        s2 = resistance_summary(delaunay(rot), w, band=2.0)
        assert s2.r_horizontal == pytest.approx(s1.r_horizontal, rel=1e-9)
        assert s2.r_vertical == pytest.approx(s1.r_vertical, rel=1e-9)

    def test_axis_swap_under_transpose(self):
        # Reflecting across the diagonal exchanges the horizontal and
        # vertical measurements.
        w = Window(0, 0, 10, 10)
        r = simulate_ssi(w, SsiParams(1.0, 60, 20_000), 7)
        flipped = Realization(r.points[:, ::-1].copy(), w)
        s1 = resistance_summary(delaunay(r), w, band=2.0)
        s2 = resistance_summary(delaunay(flipped), w, band=2.0)
        assert s2.r_horizontal == pytest.approx(s1.r_vertical, rel=1e-9)
        assert s2.r_vertical == pytest.approx(s1.r_horizontal, rel=1e-9)


class TestFailureModes:
    def test_no_conducting_path(self):
        # Each band has an internal edge but nothing bridges them.
        verts = [(0.5, 1.0), (0.5, 3.0), (3.5, 1.0), (3.5, 3.0)]
        t = graph(verts, [(0, 1), (2, 3)])
        with pytest.raises(NumericalError, match="no conducting path"):
            effective_resistance(t, Window(0, 0, 4, 4), "x", band=1.0)

    def test_isolated_electrodes_no_edges(self):
        t = graph([(0.5, 2.0), (3.5, 2.0)], np.empty((0, 2), dtype=np.int64))
        with pytest.raises(NumericalError, match="no conducting path"):
            effective_resistance(t, Window(0, 0, 4, 4), "x", band=1.0)

    def test_empty_electrode_band(self):
        t = graph([(2.0, 2.0), (2.5, 2.0)], [(0, 1)])
        with pytest.raises(NumericalError, match="empty electrode band"):
            effective_resistance(t, Window(0, 0, 4, 4), "x", band=0.5)

    def test_overlapping_bands(self):
        # A vertex claimed by both electrodes makes the two-point problem
        # ill-posed; the middle vertex lands in both bands at width 3.
        t = graph([(0.5, 2.0), (2.0, 2.0), (3.5, 2.0)], [(0, 1), (1, 2)])
        with pytest.raises(NumericalError, match="bands overlap"):
            effective_resistance(t, Window(0, 0, 4, 4), "x", band=3.0)

    def test_band_and_axis_validation(self):
        t = graph([(0.5, 2.0), (3.5, 2.0)], [(0, 1)])
        with pytest.raises(ValueError, match="band"):
            effective_resistance(t, Window(0, 0, 4, 4), "x", band=0.0)
        with pytest.raises(ValueError, match="axis"):
            effective_resistance(t, Window(0, 0, 4, 4), "z", band=1.0)


class TestOnTriangulatedPatterns:
    def test_positive_and_roughly_isotropic(self, ssi_realization):
        s = resistance_summary(delaunay(ssi_realization), ssi_realization.window)
        assert s.r_horizontal > 0 and s.r_vertical > 0
        assert np.isfinite(s.anisotropy)
        assert 0.4 < s.anisotropy < 2.5

    def test_summary_fields(self):
        s = ResistanceSummary(2.0, 0.5)
        assert s.anisotropy == 4.0

    def test_denser_pattern_conducts_better(self):
        # More points means more parallel routes, so resistance drops.
        w = Window(0, 0, 20, 20)
        sparse = simulate_ssi(w, SsiParams(2.0, 40, 20_000), 11)
        dense = simulate_ssi(w, SsiParams(1.0, 160, 20_000), 11)
        r_sparse = effective_resistance(delaunay(sparse), w, "x", 2.0)
        r_dense = effective_resistance(delaunay(dense), w, "x", 2.0)
        assert r_dense < r_sparse
