"""Delaunay triangulation and graph summaries of a point pattern.

The triangulation is built incrementally (Bowyer-Watson) inside a large
synthetic frame triangle, then cleaned back to the observation window.
In-circumcircle and orientation tests evaluate in floating point with an
error bound; results too close to zero are recomputed in exact rational
arithmetic, so degenerate inputs (cocircular quadruples, collinear
subsets) are handled deterministically.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

import numpy as np
from numpy.typing import NDArray

from .geometry import Realization, Window

# Relative filter on the floating-point determinant: values within
# _REL * (permanent of absolute values) of zero are re-evaluated exactly.
# The bound is far above the true rounding error, trading rare exact
# evaluations for certainty.
_REL = 1e-12
_ABS = 1e-300


def _sign(x: Fraction) -> int:
    return (x > 0) - (x < 0)


def _orient_exact(a, b, c) -> int:
    F = Fraction
    det = (F(float(b[0])) - F(float(a[0]))) * (F(float(c[1])) - F(float(a[1]))) - (
        F(float(b[1])) - F(float(a[1]))
    ) * (F(float(c[0])) - F(float(a[0])))
    return _sign(det)


def orient(a, b, c) -> int:
    """Sign of the signed area of triangle abc (+1 counter-clockwise)."""
    detleft = (b[0] - a[0]) * (c[1] - a[1])
    detright = (b[1] - a[1]) * (c[0] - a[0])
    det = detleft - detright
    perm = abs(detleft) + abs(detright)
    if abs(det) > _REL * perm + _ABS:
        return 1 if det > 0 else -1
    return _orient_exact(a, b, c)


def _incircle_exact(a, b, c, p) -> int:
    F = Fraction
    adx = F(float(a[0])) - F(float(p[0]))
    ady = F(float(a[1])) - F(float(p[1]))
    bdx = F(float(b[0])) - F(float(p[0]))
    bdy = F(float(b[1])) - F(float(p[1]))
    cdx = F(float(c[0])) - F(float(p[0]))
    cdy = F(float(c[1])) - F(float(p[1]))
    alift = adx * adx + ady * ady
    blift = bdx * bdx + bdy * bdy
    clift = cdx * cdx + cdy * cdy
    det = (
        adx * (bdy * clift - blift * cdy)
        - ady * (bdx * clift - blift * cdx)
        + alift * (bdx * cdy - bdy * cdx)
    )
    return _sign(det)


def incircle(a, b, c, p) -> int:
    """+1 when p lies strictly inside the circumcircle of CCW triangle abc."""
    inside, det = _incircle_mask(
        np.asarray([a], dtype=float),
        np.asarray([b], dtype=float),
        np.asarray([c], dtype=float),
        np.asarray(p, dtype=float),
    )
    return 1 if inside[0] else (-1 if det[0] < 0 else 0)


def _incircle_mask(
    a: NDArray[np.float64],
    b: NDArray[np.float64],
    c: NDArray[np.float64],
    p: NDArray[np.float64],
) -> tuple[NDArray[np.bool_], NDArray[np.float64]]:
    """Vectorized strict in-circumcircle test of p against CCW triangles.

    Returns (inside, det); uncertain determinants have already been
    replaced by their exact sign.
    """
    adx = a[:, 0] - p[0]
    ady = a[:, 1] - p[1]
    bdx = b[:, 0] - p[0]
    bdy = b[:, 1] - p[1]
    cdx = c[:, 0] - p[0]
    cdy = c[:, 1] - p[1]
    alift = adx * adx + ady * ady
    blift = bdx * bdx + bdy * bdy
    clift = cdx * cdx + cdy * cdy
    det = (
        adx * (bdy * clift - blift * cdy)
        - ady * (bdx * clift - blift * cdx)
        + alift * (bdx * cdy - bdy * cdx)
    )
    perm = (
        np.abs(adx) * (np.abs(bdy) * clift + blift * np.abs(cdy))
        + np.abs(ady) * (np.abs(bdx) * clift + blift * np.abs(cdx))
        + alift * (np.abs(bdx) * np.abs(cdy) + np.abs(bdy) * np.abs(cdx))
    )
    uncertain = np.abs(det) <= _REL * perm + _ABS
    if uncertain.any():
        for i in np.flatnonzero(uncertain):
            det[i] = _incircle_exact(a[i], b[i], c[i], p)
    return det > 0, det


@dataclass(frozen=True)
class Triangulation:
    """Vertices with canonical triangle and edge index arrays.

    Triangle rows are sorted ascending and rows lexicographically ordered;
    edges are the unique undirected pairs appearing in triangles.
    """

    vertices: NDArray[np.float64]
    triangles: NDArray[np.int64]
    edges: NDArray[np.int64]

    def __post_init__(self) -> None:
        verts = np.asarray(self.vertices, dtype=float).reshape(-1, 2)
        tris = np.asarray(self.triangles, dtype=np.int64).reshape(-1, 3)
        edges = np.asarray(self.edges, dtype=np.int64).reshape(-1, 2)
        if tris.size:
            if tris.min() < 0 or tris.max() >= len(verts):
                raise ValueError("triangle index out of range")
            if (np.diff(np.sort(tris, axis=1), axis=1) == 0).any():
                raise ValueError("triangle with repeated vertex")
        for arr in (verts, tris, edges):
            arr.flags.writeable = False
        object.__setattr__(self, "vertices", verts)
        object.__setattr__(self, "triangles", tris)
        object.__setattr__(self, "edges", edges)

    @property
    def n_vertices(self) -> int:
        return len(self.vertices)

    @classmethod
    def from_triangles(
        cls, vertices: NDArray[np.float64], triangles: NDArray[np.int64]
    ) -> "Triangulation":
        tris = np.asarray(triangles, dtype=np.int64).reshape(-1, 3)
        tris = np.sort(tris, axis=1)
        if len(tris):
            order = np.lexsort((tris[:, 2], tris[:, 1], tris[:, 0]))
            tris = tris[order]
            pairs = np.vstack([tris[:, [0, 1]], tris[:, [0, 2]], tris[:, [1, 2]]])
            edges = np.unique(pairs, axis=0)
        else:
            edges = np.empty((0, 2), dtype=np.int64)
        return cls(np.asarray(vertices, dtype=float), tris, edges)


def _frame_vertices(pts: NDArray[np.float64]) -> NDArray[np.float64]:
    cx = (pts[:, 0].min() + pts[:, 0].max()) / 2
    cy = (pts[:, 1].min() + pts[:, 1].max()) / 2
    span = max(pts[:, 0].max() - pts[:, 0].min(), pts[:, 1].max() - pts[:, 1].min(), 1.0)
    m = 1e5 * span
    return np.array([[cx - 3 * m, cy - m], [cx + 3 * m, cy - m], [cx, cy + 3 * m]])


def delaunay_with_frame(points: NDArray[np.float64]) -> Triangulation:
    """Bowyer-Watson triangulation of the points inside a huge frame triangle.

    The returned triangulation includes the three frame vertices (the last
    three indices); clean() removes them.  Triangles are stored CCW during
    construction, so every insertion's cavity comes straight from the
    strict in-circumcircle test.
    """
    pts = np.asarray(points, dtype=float).reshape(-1, 2)
    n = len(pts)
    if n == 0:
        raise ValueError("degenerate input: no points to triangulate")
    if len(np.unique(pts, axis=0)) != n:
        raise ValueError("degenerate input: duplicate points")
    verts = np.vstack([pts, _frame_vertices(pts)])
    tris = np.array([[n, n + 1, n + 2]], dtype=np.int64)  # frame is CCW

    for i in range(n):
        p = verts[i]
        a = verts[tris[:, 0]]
        b = verts[tris[:, 1]]
        c = verts[tris[:, 2]]
        bad, _ = _incircle_mask(a, b, c, p)
        if not bad.any():
            raise RuntimeError("insertion point outside every circumcircle")
        # Directed edges of CCW bad triangles whose reverse is absent are
        # the cavity boundary, already oriented with the cavity on the left.
        directed: set[tuple[int, int]] = set()
        for t in tris[bad]:
            for u, v in ((t[0], t[1]), (t[1], t[2]), (t[2], t[0])):
                if (v, u) in directed:
                    directed.remove((v, u))
                else:
                    directed.add((u, v))
        new = np.array([[u, v, i] for u, v in sorted(directed)], dtype=np.int64)
        tris = np.vstack([tris[~bad], new])
    return Triangulation.from_triangles(verts, tris)


def clean(t: Triangulation, w: Window) -> Triangulation:
    """Restrict a triangulation to vertices inside the window.

    Drops every vertex outside the closed window (frame vertices included)
    together with any triangle touching one.
    """
    keep = w.contains(t.vertices)
    new_index = np.cumsum(keep) - 1
    tri_keep = keep[t.triangles].all(axis=1) if len(t.triangles) else np.zeros(0, bool)
    tris = new_index[t.triangles[tri_keep]] if len(t.triangles) else t.triangles
    return Triangulation.from_triangles(t.vertices[keep], tris)


def delaunay(r: Realization) -> Triangulation:
    """Delaunay triangulation of a realization, cleaned to its window."""
    if r.n < 3:
        raise ValueError("degenerate input: triangulation needs at least 3 points")
    result = clean(delaunay_with_frame(r.points), r.window)
    if len(result.triangles) == 0:
        raise ValueError("degenerate input: all points collinear")
    return result


# --------------------------------------------------------------------------
# Adjacency structure and spectral counts


@dataclass(frozen=True)
class AdjacencyMatrix:
    """Symmetric 0/1 adjacency of a triangulation, stored as an edge list."""

    n: int
    edges: NDArray[np.int64]

    def __post_init__(self) -> None:
        edges = np.asarray(self.edges, dtype=np.int64).reshape(-1, 2)
        if len(edges):
            if edges.min() < 0 or edges.max() >= self.n:
                raise ValueError("edge index out of range")
            if (edges[:, 0] == edges[:, 1]).any():
                raise ValueError("self-loops are not allowed")
        edges.flags.writeable = False
        object.__setattr__(self, "edges", edges)

    def to_dense(self) -> NDArray[np.float64]:
        m = np.zeros((self.n, self.n))
        if len(self.edges):
            m[self.edges[:, 0], self.edges[:, 1]] = 1.0
            m[self.edges[:, 1], self.edges[:, 0]] = 1.0
        return m

    def degrees(self) -> NDArray[np.int64]:
        d = np.zeros(self.n, dtype=np.int64)
        for col in (0, 1):
            np.add.at(d, self.edges[:, col], 1)
        return d


def adjacency(t: Triangulation) -> AdjacencyMatrix:
    return AdjacencyMatrix(t.n_vertices, t.edges)


def top_eigenvalues(a: AdjacencyMatrix, k: int = 3) -> NDArray[np.float64]:
    """The k largest adjacency eigenvalues, descending."""
    if k < 1:
        raise ValueError("k must be >= 1")
    if a.n < k:
        raise ValueError(f"adjacency has {a.n} vertices, need at least {k}")
    vals = np.linalg.eigvalsh(a.to_dense())
    return vals[::-1][:k].copy()


def char_poly_coeffs(a: AdjacencyMatrix) -> NDArray[np.float64]:
    """Monic characteristic polynomial coefficients [1, c1, ..., cn].

    Computed by the Faddeev-LeVerrier recurrence, which is exact in exact
    arithmetic but numerically delicate, hence the size guard.  For the
    adjacency matrix of a simple graph, c1 = 0, -c2 is the edge count and
    -c3 / 2 the triangle count.
    """
    if a.n > 64:
        raise ValueError(
            "characteristic polynomial limited to 64 vertices; "
            "use top_eigenvalues for larger graphs"
        )
    A = a.to_dense()
    n = a.n
    coeffs = np.zeros(n + 1)
    coeffs[0] = 1.0
    M = A.copy()
    for k in range(1, n + 1):
        coeffs[k] = -np.trace(M) / k
        if k < n:
            M = A @ (M + coeffs[k] * np.eye(n))
    return coeffs


def triangle_count_spectral(a: AdjacencyMatrix) -> int:
    """Number of triangles in the graph, via trace(A^3) / 6."""
    A = a.to_dense()
    return int(round(np.trace(A @ A @ A) / 6.0))
