"""Observation windows, point-pattern realizations, nearest neighbours.

A Realization couples an (n, 2) coordinate array with the rectangular
window it was observed in, plus an optional process label and the seed
that regenerates it.  Both are immutable: downstream summaries may cache
derived quantities keyed by identity.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any

import numpy as np
from numpy.typing import NDArray
from scipy.spatial import cKDTree


@dataclass(frozen=True)
class Window:
    """Axis-aligned rectangle [xmin, xmax] x [ymin, ymax]."""

    xmin: float
    ymin: float
    xmax: float
    ymax: float

    def __post_init__(self) -> None:
        vals = (self.xmin, self.ymin, self.xmax, self.ymax)
        if not all(np.isfinite(v) for v in vals):
            raise ValueError("window bounds must be finite")
        if self.xmax <= self.xmin or self.ymax <= self.ymin:
            raise ValueError("degenerate window: sides must have positive length")

    @property
    def width(self) -> float:
        return self.xmax - self.xmin

    @property
    def height(self) -> float:
        return self.ymax - self.ymin

    @property
    def area(self) -> float:
        return self.width * self.height

    def contains(self, points: NDArray[np.float64]) -> NDArray[np.bool_]:
        """Boolean mask of points inside the closed rectangle."""
        pts = np.asarray(points, dtype=float).reshape(-1, 2)
        return (
            (pts[:, 0] >= self.xmin)
            & (pts[:, 0] <= self.xmax)
            & (pts[:, 1] >= self.ymin)
            & (pts[:, 1] <= self.ymax)
        )


def erode_window(w: Window, margin: float) -> Window:
    """Move every boundary of w inward by margin.

    Raises ValueError when 2 * margin meets or exceeds a side length.  A
    negative margin dilates instead, which simulators use to extend the
    sampling window beyond the observation window.
    """
    if not np.isfinite(margin):
        raise ValueError("margin must be finite")
    if 2 * margin >= w.width or 2 * margin >= w.height:
        raise ValueError(
            f"degenerate window: margin {margin} too large for "
            f"{w.width} x {w.height} window"
        )
    return Window(w.xmin + margin, w.ymin + margin, w.xmax - margin, w.ymax - margin)


@dataclass(frozen=True)
class Realization:
    """An observed point pattern: coordinates, window, label, seed."""

    points: NDArray[np.float64]
    window: Window
    label: str | None = None
    seed: int | None = None
    meta: dict[str, Any] = field(default_factory=dict, compare=False, repr=False)

    def __post_init__(self) -> None:
        pts = np.asarray(self.points, dtype=float)
        if pts.size == 0:
            pts = pts.reshape(0, 2)
        if pts.ndim != 2 or pts.shape[1] != 2:
            raise ValueError("points must be an (n, 2) array")
        if not np.all(np.isfinite(pts)):
            raise ValueError("points must be finite")
        if pts.size and not self.window.contains(pts).all():
            raise ValueError("points must lie inside the window")
        pts = pts.copy()
        pts.flags.writeable = False
        object.__setattr__(self, "points", pts)

    @property
    def n(self) -> int:
        return self.points.shape[0]

    def intensity(self) -> float:
        """Points per unit area."""
        return self.n / self.window.area


def clip(
    points: NDArray[np.float64],
    w: Window,
    label: str | None = None,
    seed: int | None = None,
) -> Realization:
    """Realization of the points falling inside w (original order kept)."""
    pts = np.asarray(points, dtype=float)
    if pts.size == 0:
        pts = pts.reshape(0, 2)
    return Realization(pts[w.contains(pts)], w, label=label, seed=seed)


def observe(r: Realization, margin: float) -> Realization:
    """Clip a realization to its window eroded by margin.

    This is the minus-sampling step: simulate on a larger window, observe
    on the central part so boundary effects do not bias the summaries.
    """
    return clip(r.points, erode_window(r.window, margin), label=r.label, seed=r.seed)


def nn_distances(r: Realization) -> NDArray[np.float64]:
    """Distance from each point to its nearest neighbour, in point order."""
    if r.n < 2:
        raise ValueError("insufficient points: nearest-neighbour distances need n >= 2")
    tree = cKDTree(r.points)
    d, _ = tree.query(r.points, k=2)
    return d[:, 1].astype(float)
