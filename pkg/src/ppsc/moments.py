"""Low-order moment estimates of the random set of unit discs.

A point pattern induces a random set: the union of closed discs of fixed
radius around the points.  The first three moment measures of that set
are estimated by coverage fractions on a regular grid: m1 is the volume
fraction, m2(r) the probability that a location and its translate by lag
r are both covered, m3(r, s) the analogue for two lags.  The third-order
cumulant combines them in a form that vanishes identically when coverage
events are independent.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from numpy.typing import NDArray
from scipy.spatial import cKDTree

from .geometry import Realization, Window

Lag = tuple[float, float]


def _grid(window: Window, grid_step: float) -> NDArray[np.float64]:
    """Cell-centre grid of the given pitch covering the window."""
    if grid_step <= 0:
        raise ValueError("grid_step must be > 0")
    gx = np.arange(window.xmin + grid_step / 2, window.xmax, grid_step)
    gy = np.arange(window.ymin + grid_step / 2, window.ymax, grid_step)
    if len(gx) == 0 or len(gy) == 0:
        raise ValueError("grid_step too large for window")
    return np.column_stack([a.ravel() for a in np.meshgrid(gx, gy)])


def _covered(
    tree: cKDTree | None, locations: NDArray[np.float64], radius: float
) -> NDArray[np.bool_]:
    if tree is None:
        return np.zeros(len(locations), dtype=bool)
    d, _ = tree.query(locations, k=1)
    return d <= radius


def coverage_fraction(
    points: NDArray[np.float64], window: Window, radius: float, grid_step: float
) -> float:
    """Fraction of grid locations inside window within radius of some point."""
    if radius <= 0:
        raise ValueError("radius must be > 0")
    pts = np.asarray(points, dtype=float).reshape(-1, 2)
    grid = _grid(window, grid_step)
    tree = cKDTree(pts) if len(pts) else None
    return float(np.mean(_covered(tree, grid, radius)))


def _shifted_window(window: Window, lags: list[Lag]) -> Window:
    """Locations x with x + lag inside window for every lag (x itself included
    via the implicit zero lag)."""
    xmin, ymin, xmax, ymax = window.xmin, window.ymin, window.xmax, window.ymax
    for lx, ly in lags:
        xmin = max(xmin, window.xmin - lx)
        xmax = min(xmax, window.xmax - lx)
        ymin = max(ymin, window.ymin - ly)
        ymax = min(ymax, window.ymax - ly)
    if xmax <= xmin or ymax <= ymin:
        raise ValueError("lag exceeds window")
    return Window(xmin, ymin, xmax, ymax)


def estimate_m1(r: Realization, radius: float, grid_step: float = 0.1) -> float:
    """Volume fraction of the union of radius-discs around the points."""
    return coverage_fraction(r.points, r.window, radius, grid_step)


def estimate_m2(
    r: Realization, radius: float, lag: Lag, grid_step: float = 0.1
) -> float:
    """P(x covered and x + lag covered), averaged over valid grid locations."""
    if radius <= 0:
        raise ValueError("radius must be > 0")
    lag = (float(lag[0]), float(lag[1]))
    base = _shifted_window(r.window, [lag])
    grid = _grid(base, grid_step)
    tree = cKDTree(r.points) if r.n else None
    here = _covered(tree, grid, radius)
    there = _covered(tree, grid + np.asarray(lag), radius)
    return float(np.mean(here & there))


def estimate_m3(
    r: Realization, radius: float, lag_r: Lag, lag_s: Lag, grid_step: float = 0.1
) -> float:
    """P(x, x + lag_r, x + lag_s all covered) over valid grid locations."""
    if radius <= 0:
        raise ValueError("radius must be > 0")
    lag_r = (float(lag_r[0]), float(lag_r[1]))
    lag_s = (float(lag_s[0]), float(lag_s[1]))
    base = _shifted_window(r.window, [lag_r, lag_s])
    grid = _grid(base, grid_step)
    tree = cKDTree(r.points) if r.n else None
    here = _covered(tree, grid, radius)
    at_r = _covered(tree, grid + np.asarray(lag_r), radius)
    at_s = _covered(tree, grid + np.asarray(lag_s), radius)
    return float(np.mean(here & at_r & at_s))


def third_cumulant(m1: float, m2_r: float, m2_s: float, m2_rs: float, m3: float) -> float:
    """Third-order cumulant from the moment estimates.

    kappa3(r, s) = m3(r, s) - m1 * (m2(r) + m2(s) + m2(r - s)) + 2 * m1^3.
    Vanishes when coverage indicators at distinct locations are independent
    (substitute m2 = m1^2 and m3 = m1^3).
    """
    for name, v in (("m1", m1), ("m2_r", m2_r), ("m2_s", m2_s), ("m2_rs", m2_rs), ("m3", m3)):
        if not (0.0 <= v <= 1.0):
            raise ValueError(f"{name} must be in [0, 1], got {v}")
    return m3 - m1 * (m2_r + m2_s + m2_rs) + 2.0 * m1**3


@dataclass(frozen=True)
class MomentEstimates:
    """Moment estimates of the disc union for one realization."""

    radius: float
    grid_step: float
    m1: float
    m2: dict[Lag, float] = field(default_factory=dict)
    m3: dict[tuple[Lag, Lag], float] = field(default_factory=dict)
    kappa3: dict[tuple[Lag, Lag], float] = field(default_factory=dict)


def moment_estimates(
    r: Realization,
    radius: float,
    lags: list[Lag] | None = None,
    triples: list[tuple[Lag, Lag]] | None = None,
    grid_step: float = 0.1,
) -> MomentEstimates:
    """m1, m2 over the lags, and m3 with kappa3 over the lag pairs.

    Lag pairs pull in the m2 values they need (both lags and their
    difference) even when those are absent from lags.
    """
    lags = [(float(a), float(b)) for a, b in (lags or [])]
    triples = [((float(a), float(b)), (float(c), float(d))) for (a, b), (c, d) in (triples or [])]
    m1 = estimate_m1(r, radius, grid_step)
    need = dict.fromkeys(lags)
    for lag_r, lag_s in triples:
        diff = (lag_r[0] - lag_s[0], lag_r[1] - lag_s[1])
        for lag in (lag_r, lag_s, diff):
            need.setdefault(lag)
    m2 = {lag: estimate_m2(r, radius, lag, grid_step) for lag in need}
    m3 = {}
    kappa3 = {}
    for lag_r, lag_s in triples:
        diff = (lag_r[0] - lag_s[0], lag_r[1] - lag_s[1])
        val = estimate_m3(r, radius, lag_r, lag_s, grid_step)
        m3[(lag_r, lag_s)] = val
        kappa3[(lag_r, lag_s)] = third_cumulant(
            m1, m2[lag_r], m2[lag_s], m2[diff], val
        )
    return MomentEstimates(radius, grid_step, m1, m2, m3, kappa3)
