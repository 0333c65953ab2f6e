"""Fixed-length summary vectors for point-pattern realizations.

Each realization reduces to ten statistics:

* alpha, beta, sigma: coefficients and residual scale of a regression of
  log(1 - G) on the distance beyond the hard core and its second-order
  Legendre transform, where G is the empirical nearest-neighbour
  distance distribution.
* tri_density, max_side, max_angle, max_area: Delaunay triangle count
  per unit area and the most extreme triangle shape statistics.
* eig1, eig2, eig3: the three largest adjacency eigenvalues of the
  triangulation graph.

The vector layout is frozen (FEATURE_NAMES) so CSV files, classifiers
and reports all agree on column order.
"""

from __future__ import annotations

import os
from dataclasses import dataclass
from pathlib import Path
from typing import Sequence

import numpy as np
from numpy.typing import NDArray

from .geometry import Realization, Window, nn_distances
from .triangulate import (
    Triangulation,
    adjacency,
    char_poly_coeffs,
    delaunay,
    top_eigenvalues,
)

FEATURE_NAMES: tuple[str, ...] = (
    "alpha",
    "beta",
    "sigma",
    "tri_density",
    "max_side",
    "max_angle",
    "max_area",
    "eig1",
    "eig2",
    "eig3",
)


# --------------------------------------------------------------------------
# Nearest-neighbour distance model


@dataclass(frozen=True)
class GEstimate:
    """Empirical nearest-neighbour distribution via plotting positions.

    r_values are the sorted distances d_(1) <= ... <= d_(n) and g_values
    the positions i / (n + 1), so G never reaches 0 or 1 and log(1 - G)
    stays finite.
    """

    r_values: NDArray[np.float64]
    g_values: NDArray[np.float64]


def _plotting_positions(
    distances: NDArray[np.float64],
) -> tuple[NDArray[np.float64], NDArray[np.float64]]:
    d = np.sort(np.asarray(distances, dtype=float))
    n = len(d)
    return d, np.arange(1, n + 1) / (n + 1)


def estimate_G(distances: NDArray[np.float64]) -> GEstimate:
    if len(distances) < 3:
        raise ValueError("insufficient points: G estimate needs at least 3 distances")
    r, g = _plotting_positions(distances)
    return GEstimate(r, g)


def legendre2(x):
    """Second-order Legendre polynomial (3 x^2 - 1) / 2, elementwise."""
    x = np.asarray(x, dtype=float)
    return (3.0 * x * x - 1.0) / 2.0


@dataclass(frozen=True)
class NnModelFit:
    """Least-squares fit of log(1 - G(d)) = alpha * t + beta * L2(t).

    t = d - hardcore is the distance beyond the hard core; there is no
    intercept since G(hardcore) = 0.  sigma is the residual standard
    deviation with n - 2 degrees of freedom (zero when n == 2, where the
    fit interpolates).
    """

    alpha: float
    beta: float
    sigma: float
    n_distances: int
    hardcore: float


def fit_nn_model(distances: NDArray[np.float64], hardcore: float = 2.0) -> NnModelFit:
    d, g = _plotting_positions(distances)
    n = len(d)
    if n < 2:
        raise ValueError("insufficient points: model fit needs at least 2 distances")
    t = d - hardcore
    y = np.log1p(-g)
    design = np.column_stack([t, legendre2(t)])
    coef, residual, rank, _ = np.linalg.lstsq(design, y, rcond=None)
    if rank < 2:
        raise ValueError("degenerate design: distances do not span the model")
    if n == 2:
        sigma = 0.0
    else:
        rss = float(residual[0]) if residual.size else float(
            np.sum((y - design @ coef) ** 2)
        )
        sigma = float(np.sqrt(rss / (n - 2)))
    return NnModelFit(float(coef[0]), float(coef[1]), sigma, n, hardcore)


# --------------------------------------------------------------------------
# Triangulation statistics


@dataclass(frozen=True)
class TriangulationSummary:
    """Triangle density and the most extreme triangle in the window."""

    tri_density: float
    max_side: float
    max_angle: float
    max_area: float


def triangulation_summary(t: Triangulation, w: Window) -> TriangulationSummary:
    if len(t.triangles) == 0:
        raise ValueError("empty triangulation: no triangles to summarize")
    a = t.vertices[t.triangles[:, 0]]
    b = t.vertices[t.triangles[:, 1]]
    c = t.vertices[t.triangles[:, 2]]
    sides = np.stack(
        [
            np.linalg.norm(b - c, axis=1),
            np.linalg.norm(c - a, axis=1),
            np.linalg.norm(a - b, axis=1),
        ]
    )
    # Law of cosines per corner; clip for rounding at degenerate corners.
    s2 = sides**2
    cos = np.stack(
        [
            (s2[1] + s2[2] - s2[0]) / (2 * sides[1] * sides[2]),
            (s2[2] + s2[0] - s2[1]) / (2 * sides[2] * sides[0]),
            (s2[0] + s2[1] - s2[2]) / (2 * sides[0] * sides[1]),
        ]
    )
    angles = np.arccos(np.clip(cos, -1.0, 1.0))
    cross = (b[:, 0] - a[:, 0]) * (c[:, 1] - a[:, 1]) - (b[:, 1] - a[:, 1]) * (
        c[:, 0] - a[:, 0]
    )
    areas = np.abs(cross) / 2.0
    return TriangulationSummary(
        tri_density=len(t.triangles) / w.area,
        max_side=float(sides.max()),
        max_angle=float(angles.max()),
        max_area=float(areas.max()),
    )


@dataclass(frozen=True)
class SpectralSummary:
    """Three largest adjacency eigenvalues, optionally with the full
    characteristic polynomial (small graphs only)."""

    eig1: float
    eig2: float
    eig3: float
    char_coeffs: NDArray[np.float64] | None = None


def spectral_summary(t: Triangulation, with_char_coeffs: bool = False) -> SpectralSummary:
    adj = adjacency(t)
    e = top_eigenvalues(adj, 3)
    coeffs = char_poly_coeffs(adj) if with_char_coeffs else None
    return SpectralSummary(float(e[0]), float(e[1]), float(e[2]), coeffs)


# --------------------------------------------------------------------------
# The feature vector


@dataclass(frozen=True)
class FeatureVector:
    alpha: float
    beta: float
    sigma: float
    tri_density: float
    max_side: float
    max_angle: float
    max_area: float
    eig1: float
    eig2: float
    eig3: float

    def to_array(self) -> NDArray[np.float64]:
        return np.array([getattr(self, name) for name in FEATURE_NAMES])

    @classmethod
    def from_array(cls, values: NDArray[np.float64]) -> "FeatureVector":
        values = np.asarray(values, dtype=float).reshape(-1)
        if len(values) != len(FEATURE_NAMES):
            raise ValueError(f"expected {len(FEATURE_NAMES)} values, got {len(values)}")
        return cls(**{name: float(v) for name, v in zip(FEATURE_NAMES, values)})


def feature_vector(r: Realization, hardcore: float = 2.0) -> FeatureVector:
    """The ten summary statistics of one realization."""
    fit = fit_nn_model(nn_distances(r), hardcore)
    tri = delaunay(r)
    tsum = triangulation_summary(tri, r.window)
    eigs = top_eigenvalues(adjacency(tri), 3)
    return FeatureVector(
        alpha=fit.alpha,
        beta=fit.beta,
        sigma=fit.sigma,
        tri_density=tsum.tri_density,
        max_side=tsum.max_side,
        max_angle=tsum.max_angle,
        max_area=tsum.max_area,
        eig1=float(eigs[0]),
        eig2=float(eigs[1]),
        eig3=float(eigs[2]),
    )


def combine_pooled(
    vectors: Sequence[FeatureVector],
    distances: Sequence[NDArray[np.float64]],
    hardcore: float = 2.0,
) -> FeatureVector:
    """Pooled vector from per-realization pieces.

    The regression refits on the concatenated nearest-neighbour distances;
    every other statistic is the minimum across the realizations, the
    direction in which regular patterns are extreme.
    """
    if len(vectors) != len(distances):
        raise ValueError("vectors and distances must pair up")
    fit = fit_nn_model(np.concatenate([np.asarray(d, float) for d in distances]), hardcore)
    rest = np.min([v.to_array() for v in vectors], axis=0)
    values = np.concatenate([[fit.alpha, fit.beta, fit.sigma], rest[3:]])
    return FeatureVector.from_array(values)


def pooled_feature_vector(
    realizations: Sequence[Realization], hardcore: float = 2.0
) -> FeatureVector:
    """Single vector for a group of five realizations of one process."""
    if len(realizations) != 5:
        raise ValueError(f"pooling expects exactly 5 realizations, got {len(realizations)}")
    vectors = [feature_vector(r, hardcore) for r in realizations]
    dists = [nn_distances(r) for r in realizations]
    return combine_pooled(vectors, dists, hardcore)


# --------------------------------------------------------------------------
# Feature CSV files

_CSV_HEADER = "label,seed," + ",".join(FEATURE_NAMES)


def write_feature_csv(
    path: str | os.PathLike,
    rows: Sequence[tuple[str, int, FeatureVector]],
) -> None:
    """CSV with header label,seed,<features>; 12 significant digits."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    lines = [_CSV_HEADER]
    for label, seed, fv in rows:
        values = ",".join(f"{v:.12g}" for v in fv.to_array())
        lines.append(f"{label},{int(seed)},{values}")
    path.write_text("\n".join(lines) + "\n")


def read_feature_csv(
    path: str | os.PathLike,
) -> list[tuple[str, int, FeatureVector]]:
    path = Path(path)
    lines = path.read_text().splitlines()
    if not lines or lines[0] != _CSV_HEADER:
        raise ValueError(f"{path}: expected header {_CSV_HEADER!r}")
    rows = []
    for lineno, line in enumerate(lines[1:], start=2):
        if not line.strip():
            continue
        parts = line.split(",")
        if len(parts) != 2 + len(FEATURE_NAMES):
            raise ValueError(f"{path}:{lineno}: expected {2 + len(FEATURE_NAMES)} fields")
        fv = FeatureVector.from_array(np.array([float(v) for v in parts[2:]]))
        rows.append((parts[0], int(parts[1]), fv))
    return rows
