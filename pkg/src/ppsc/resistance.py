"""Effective resistance of the triangulation viewed as a resistor network.

Each triangulation edge is a resistor whose conductance is the reciprocal
of its length.  Vertices inside a band along one window side form one
electrode, vertices in the opposite band the other; both bands collapse
to super-nodes and the reduced Laplacian system yields the effective
resistance between them.  The ratio of horizontal to vertical resistance
is a scale-free anisotropy measure of the pattern.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import NumericalError
from .geometry import Window
from .triangulate import Triangulation


@dataclass(frozen=True)
class ResistanceSummary:
    r_horizontal: float
    r_vertical: float

    @property
    def anisotropy(self) -> float:
        return self.r_horizontal / self.r_vertical


def _electrodes(t: Triangulation, w: Window, axis: str, band: float):
    x = t.vertices[:, 0]
    y = t.vertices[:, 1]
    if axis == "x":
        source = x <= w.xmin + band
        sink = x >= w.xmax - band
    elif axis == "y":
        source = y <= w.ymin + band
        sink = y >= w.ymax - band
    else:
        raise ValueError(f"axis must be 'x' or 'y', got {axis!r}")
    if not source.any() or not sink.any():
        raise NumericalError(f"empty electrode band (axis {axis!r}, width {band})")
    if (source & sink).any():
        raise NumericalError("electrode bands overlap: band too wide for window")
    return source, sink


def effective_resistance(t: Triangulation, w: Window, axis: str, band: float) -> float:
    """Resistance between opposite electrode bands along the given axis."""
    if band <= 0:
        raise ValueError("band must be > 0")
    source, sink = _electrodes(t, w, axis, band)

    # Group vertices: 0 = source super-node, 1 = sink, 2.. = the rest.
    group = np.full(t.n_vertices, -1, dtype=np.int64)
    group[source] = 0
    group[sink] = 1
    free = np.flatnonzero(group < 0)
    group[free] = 2 + np.arange(len(free))
    n_groups = 2 + len(free)

    lengths = np.linalg.norm(
        t.vertices[t.edges[:, 0]] - t.vertices[t.edges[:, 1]], axis=1
    )
    conduct = 1.0 / lengths
    ga = group[t.edges[:, 0]]
    gb = group[t.edges[:, 1]]
    external = ga != gb  # edges inside an electrode are short-circuited

    lap = np.zeros((n_groups, n_groups))
    np.add.at(lap, (ga[external], gb[external]), -conduct[external])
    np.add.at(lap, (gb[external], ga[external]), -conduct[external])
    np.add.at(lap, (ga[external], ga[external]), conduct[external])
    np.add.at(lap, (gb[external], gb[external]), conduct[external])

    # Current can only flow through the connected component holding both
    # electrodes; restrict the system to it (isolated vertices would make
    # the grounded Laplacian singular).
    component = _component_of(n_groups, ga[external], gb[external], start=0)
    if not component[1]:
        raise NumericalError("no conducting path between the electrode bands")
    keep = np.flatnonzero(component)
    lap = lap[np.ix_(keep, keep)]
    pos = {g: i for i, g in enumerate(keep)}

    # Ground the sink: drop its row and column, inject unit current at the
    # source; the source potential is the effective resistance.
    idx = [i for i in range(len(keep)) if keep[i] != 1]
    reduced = lap[np.ix_(idx, idx)]
    rhs = np.zeros(len(idx))
    rhs[idx.index(pos[0])] = 1.0
    try:
        potential = np.linalg.solve(reduced, rhs)
    except np.linalg.LinAlgError as exc:
        raise NumericalError(f"singular network Laplacian: {exc}") from exc
    return float(potential[idx.index(pos[0])])


def _component_of(n: int, ga: np.ndarray, gb: np.ndarray, start: int) -> np.ndarray:
    neighbours: list[list[int]] = [[] for _ in range(n)]
    for a, b in zip(ga, gb):
        neighbours[a].append(b)
        neighbours[b].append(a)
    seen = np.zeros(n, dtype=bool)
    stack = [start]
    seen[start] = True
    while stack:
        v = stack.pop()
        for u in neighbours[v]:
            if not seen[u]:
                seen[u] = True
                stack.append(u)
    return seen


def resistance_summary(t: Triangulation, w: Window, band: float = 2.0) -> ResistanceSummary:
    """Effective resistance along both axes with the same electrode width."""
    return ResistanceSummary(
        r_horizontal=effective_resistance(t, w, "x", band),
        r_vertical=effective_resistance(t, w, "y", band),
    )
