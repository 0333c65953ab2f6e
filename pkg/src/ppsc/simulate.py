"""Simulators for regular (hard-core) point processes.

Four families share a common hard core around each point:

* Strauss hard core: pairwise density activity^n * interaction^s(x) where
  s(x) counts pairs closer than range_R, with pairs closer than hardcore
  forbidden outright.  Sampled by Metropolis-Hastings.
* Diggle-Gratton: pairwise interaction h(t) = 0 below delta, rising as
  ((t - delta) / rho)^kappa across [delta, delta + rho), and 1 beyond.
  Sampled by the same chain.
* Simple sequential inhibition: uniform proposals accepted while they
  keep all pairwise distances at or above the hard core.
* Dead leaves: discs arrive sequentially on a dilated window; an arrival
  is retained when it overlaps no earlier arrival, and the sequence stops
  once the union of all arrived discs covers the dilated window.  Retained
  discs are disjoint, so centres inherit a hard core of one diameter.

A homogeneous Poisson simulator provides the no-interaction baseline.
All simulators are deterministic functions of (window, params, seed).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np
from numba import njit
from numpy.typing import NDArray
from scipy.spatial import cKDTree
from scipy.spatial.distance import cdist, pdist

from .errors import CalibrationError
from .geometry import Realization, Window, erode_window
from .moments import coverage_fraction
from .rng import mix_seed, rng_from

_MODEL_STRAUSS = 0
_MODEL_DG = 1

# Uniform variates are drawn from the realization's generator in fixed-size
# blocks and handed to the jitted chain, which consumes exactly four per
# proposal.  Fixed block size keeps the consumption pattern, and therefore
# the realization, independent of how often the chain pauses for a refill.
_RAND_BLOCK = 1 << 16


@dataclass(frozen=True)
class PoissonParams:
    """Homogeneous Poisson process with the given intensity."""

    intensity: float

    def __post_init__(self) -> None:
        if not (np.isfinite(self.intensity) and self.intensity >= 0):
            raise ValueError("intensity must be finite and >= 0")


@dataclass(frozen=True)
class SsiParams:
    """Simple sequential inhibition (random sequential adsorption).

    Proposals stop at target_n accepted points or after max_attempts
    consecutive rejections, whichever comes first; a shortfall is recorded
    in the realization's meta dict rather than raised.
    """

    hardcore: float
    target_n: int
    max_attempts: int = 10_000

    def __post_init__(self) -> None:
        if not (np.isfinite(self.hardcore) and self.hardcore > 0):
            raise ValueError("hardcore must be finite and > 0")
        if self.target_n < 0:
            raise ValueError("target_n must be >= 0")
        if self.max_attempts < 1:
            raise ValueError("max_attempts must be >= 1")


@dataclass(frozen=True)
class DeadLeavesParams:
    """Dead-leaves (intact grain) process with fixed disc radius.

    saturation_margin is the dilation applied to the window while grains
    arrive; it must be at least one disc diameter so that every potential
    rejector of a retained grain lies inside the sampling region.
    """

    disc_radius: float = 1.0
    saturation_margin: float = 2.0

    def __post_init__(self) -> None:
        if not (np.isfinite(self.disc_radius) and self.disc_radius > 0):
            raise ValueError("disc_radius must be finite and > 0")
        if self.saturation_margin < 2 * self.disc_radius:
            raise ValueError("saturation_margin must be >= 2 * disc_radius")


@dataclass(frozen=True)
class StraussHcParams:
    """Strauss process with a hard core.

    Unnormalized density activity^n * interaction^s(x) on configurations
    whose pairwise distances all reach hardcore, where s(x) counts pairs
    closer than range_R.  interaction = 1 reduces to a pure hard-core
    process.  init_coverage, when set, starts the chain from an
    inhibition pattern whose hardcore/2-disc coverage matches it; dense
    targets equilibrate far faster from a matching start than from below.
    shift_scale is the half-width of the uniform displacement proposed by
    a shift move (None: one hard-core distance); local shifts are what
    lets a dense packing rearrange at activities where deaths are rare.
    """

    activity: float
    interaction: float = 0.5
    range_R: float = 3.0
    hardcore: float = 2.0
    sweeps: int = 500
    init_coverage: float | None = None
    shift_scale: float | None = None

    def __post_init__(self) -> None:
        if not (np.isfinite(self.activity) and self.activity > 0):
            raise ValueError("activity must be finite and > 0")
        if not (0 < self.interaction <= 1):
            raise ValueError("interaction must be in (0, 1]")
        if not (np.isfinite(self.hardcore) and self.hardcore > 0):
            raise ValueError("hardcore must be finite and > 0")
        if self.range_R < self.hardcore:
            raise ValueError("range_R must be >= hardcore")
        if self.sweeps < 1:
            raise ValueError("sweeps must be >= 1")
        if self.init_coverage is not None and not (0 < self.init_coverage < 1):
            raise ValueError("init_coverage must be in (0, 1)")
        if self.shift_scale is not None and not (
            np.isfinite(self.shift_scale) and self.shift_scale > 0
        ):
            raise ValueError("shift_scale must be finite and > 0")


@dataclass(frozen=True)
class DiggleGrattonParams:
    """Diggle-Gratton pairwise interaction process.

    h(t) = 0 for t < delta, ((t - delta) / rho)^kappa for
    delta <= t < delta + rho, and 1 for t >= delta + rho.
    shift_scale as in StraussHcParams (None: one hard-core distance).
    """

    activity: float
    delta: float = 2.0
    rho: float = 1.0
    kappa: float = 3.0
    sweeps: int = 500
    init_coverage: float | None = None
    shift_scale: float | None = None

    def __post_init__(self) -> None:
        if not (np.isfinite(self.activity) and self.activity > 0):
            raise ValueError("activity must be finite and > 0")
        if not (np.isfinite(self.delta) and self.delta > 0):
            raise ValueError("delta must be finite and > 0")
        if not (np.isfinite(self.rho) and self.rho > 0):
            raise ValueError("rho must be finite and > 0")
        if not (np.isfinite(self.kappa) and self.kappa > 0):
            raise ValueError("kappa must be finite and > 0")
        if self.sweeps < 1:
            raise ValueError("sweeps must be >= 1")
        if self.init_coverage is not None and not (0 < self.init_coverage < 1):
            raise ValueError("init_coverage must be in (0, 1)")
        if self.shift_scale is not None and not (
            np.isfinite(self.shift_scale) and self.shift_scale > 0
        ):
            raise ValueError("shift_scale must be finite and > 0")


PairwiseParams = StraussHcParams | DiggleGrattonParams
ProcessParams = (
    PoissonParams | SsiParams | DeadLeavesParams | StraussHcParams | DiggleGrattonParams
)


# --------------------------------------------------------------------------
# Poisson and sequential simulators


def simulate_poisson(window: Window, params: PoissonParams, seed: int) -> Realization:
    rng = rng_from(seed)
    n = rng.poisson(params.intensity * window.area)
    xs = window.xmin + rng.random(n) * window.width
    ys = window.ymin + rng.random(n) * window.height
    return Realization(np.column_stack([xs, ys]), window, label="poisson", seed=seed)


def simulate_ssi(window: Window, params: SsiParams, seed: int) -> Realization:
    """Accept uniform proposals that keep pairwise distances >= hardcore.

    Neighbour lookups use a bucket grid whose cells hold at most one
    accepted point, so each proposal is O(1).
    """
    rng = rng_from(seed)
    h2 = params.hardcore * params.hardcore
    cell = params.hardcore / math.sqrt(2.0)
    nx = max(1, math.ceil(window.width / cell))
    ny = max(1, math.ceil(window.height / cell))
    grid: dict[tuple[int, int], int] = {}
    xs: list[float] = []
    ys: list[float] = []
    attempts = 0
    streak = 0
    while len(xs) < params.target_n and streak < params.max_attempts:
        attempts += 1
        x = window.xmin + rng.random() * window.width
        y = window.ymin + rng.random() * window.height
        ix = min(int((x - window.xmin) / cell), nx - 1)
        iy = min(int((y - window.ymin) / cell), ny - 1)
        ok = True
        for jx in range(ix - 2, ix + 3):
            for jy in range(iy - 2, iy + 3):
                k = grid.get((jx, jy))
                if k is not None:
                    dx = xs[k] - x
                    dy = ys[k] - y
                    if dx * dx + dy * dy < h2:
                        ok = False
                        break
            if not ok:
                break
        if ok:
            grid[(ix, iy)] = len(xs)
            xs.append(x)
            ys.append(y)
            streak = 0
        else:
            streak += 1
    pts = np.column_stack([xs, ys]) if xs else np.empty((0, 2))
    meta = {"attempts": attempts, "shortfall": len(xs) < params.target_n}
    return Realization(pts, window, label="ssi", seed=seed, meta=meta)


def dead_leaves_arrivals(
    window: Window, params: DeadLeavesParams, seed: int
) -> tuple[NDArray[np.float64], NDArray[np.bool_]]:
    """Arrival sequence of a dead-leaves simulation and its retention mask.

    Arrivals are uniform on the window dilated by saturation_margin and
    stop once their discs cover the dilated window (checked on a grid of
    pitch disc_radius / 8).  Arrival i is retained when no earlier arrival
    lies within one disc diameter.  Exposed separately from
    simulate_dead_leaves so the stopping rule can be audited.
    """
    r = params.disc_radius
    sampling = erode_window(window, -params.saturation_margin)
    rng = rng_from(seed)

    pitch = r / 8.0
    gx = np.arange(sampling.xmin + pitch / 2, sampling.xmax, pitch)
    gy = np.arange(sampling.ymin + pitch / 2, sampling.ymax, pitch)
    grid = np.column_stack([a.ravel() for a in np.meshgrid(gx, gy)])
    uncovered = np.arange(len(grid))

    # Arrivals come in fixed-size chunks; the sequence stops at the end of
    # the first chunk that completes the coverage.  Later arrivals could
    # never be retained anyway (their centres are already covered), so the
    # chunked stopping time leaves the retained pattern's law unchanged.
    chunk = 1024
    chunks: list[NDArray[np.float64]] = []
    while len(uncovered):
        xs = sampling.xmin + rng.random(chunk) * sampling.width
        ys = sampling.ymin + rng.random(chunk) * sampling.height
        pts = np.column_stack([xs, ys])
        d, _ = cKDTree(pts).query(grid[uncovered], k=1)
        uncovered = uncovered[d > r]
        chunks.append(pts)

    arrivals = np.vstack(chunks)
    retained = np.ones(len(arrivals), dtype=bool)
    pairs = cKDTree(arrivals).query_pairs(2 * r, output_type="ndarray")
    if len(pairs):
        # query_pairs returns i < j; the later arrival is the covered one.
        retained[pairs[:, 1]] = False
    return arrivals, retained


def simulate_dead_leaves(
    window: Window, params: DeadLeavesParams, seed: int
) -> Realization:
    arrivals, retained = dead_leaves_arrivals(window, params, seed)
    keep = retained & window.contains(arrivals)
    return Realization(arrivals[keep], window, label="dl", seed=seed)


# --------------------------------------------------------------------------
# Metropolis-Hastings chain for the pairwise-interaction families


@njit(cache=True)
def _log_contrib(pts, n, skip, x, y, model, hard2, aux1, aux2, aux3):
    """Log interaction of a point at (x, y) with pts[:n], skipping index skip.

    Returns (feasible, log_sum); feasible is False when a pair violates
    the hard core, in which case the density of the configuration is zero.
    """
    total = 0.0
    for i in range(n):
        if i == skip:
            continue
        dx = pts[i, 0] - x
        dy = pts[i, 1] - y
        d2 = dx * dx + dy * dy
        if d2 < hard2:
            return False, 0.0
        if model == _MODEL_STRAUSS:
            if d2 < aux1:
                total += aux2
        else:
            d = math.sqrt(d2)
            if d < aux1 + aux2:
                total += aux3 * math.log((d - aux1) / aux2)
    return True, total


@njit(cache=True)
def _chain_advance(
    pts,
    state,
    sweeps,
    rand,
    model,
    log_activity,
    hard2,
    aux1,
    aux2,
    aux3,
    xmin,
    ymin,
    width,
    height,
    shift_step,
    counts,
):
    """Advance the birth/death/shift chain until sweeps finish or rand runs out.

    state = [sweep_index, proposals_done_in_sweep, sweep_length, n]; a sweep
    issues as many proposals as there were points at its start (minimum 1).
    Proposal kinds: birth with probability 0.4, death 0.4, shift 0.2; each
    proposal consumes exactly four uniforms.  A shift displaces one point
    uniformly within a square of half-width shift_step (a symmetric
    proposal, so the acceptance ratio is plain h_new/h_old); proposals
    leaving the window are rejected.  counts[s] records the point count at
    the end of sweep s.
    """
    si = state[0]
    pos = state[1]
    slen = state[2]
    n = state[3]
    cap = pts.shape[0]
    area = width * height
    log_area = math.log(area)
    k = 0
    nrand = rand.shape[0]
    while si < sweeps:
        while pos < slen:
            if k + 4 > nrand:
                state[0] = si
                state[1] = pos
                state[2] = slen
                state[3] = n
                return k
            u_kind = rand[k]
            u1 = rand[k + 1]
            u2 = rand[k + 2]
            u_acc = rand[k + 3]
            k += 4
            pos += 1
            if u_kind < 0.4:
                if n >= cap:
                    continue
                x = xmin + u1 * width
                y = ymin + u2 * height
                ok, contrib = _log_contrib(
                    pts, n, -1, x, y, model, hard2, aux1, aux2, aux3
                )
                if not ok:
                    continue
                log_ratio = log_activity + contrib + log_area - math.log(n + 1.0)
                if math.log(u_acc) < log_ratio:
                    pts[n, 0] = x
                    pts[n, 1] = y
                    n += 1
            elif u_kind < 0.8:
                if n == 0:
                    continue
                idx = int((u_kind - 0.4) / 0.4 * n)
                if idx >= n:
                    idx = n - 1
                ok, contrib = _log_contrib(
                    pts, n, idx, pts[idx, 0], pts[idx, 1], model, hard2, aux1, aux2, aux3
                )
                accept = True
                if ok:
                    log_ratio = math.log(float(n)) - log_area - log_activity - contrib
                    accept = math.log(u_acc) < log_ratio
                if accept:
                    n -= 1
                    pts[idx, 0] = pts[n, 0]
                    pts[idx, 1] = pts[n, 1]
            else:
                if n == 0:
                    continue
                idx = int((u_kind - 0.8) / 0.2 * n)
                if idx >= n:
                    idx = n - 1
                x = pts[idx, 0] + (2.0 * u1 - 1.0) * shift_step
                y = pts[idx, 1] + (2.0 * u2 - 1.0) * shift_step
                if x < xmin or x > xmin + width or y < ymin or y > ymin + height:
                    continue
                ok_new, contrib_new = _log_contrib(
                    pts, n, idx, x, y, model, hard2, aux1, aux2, aux3
                )
                if not ok_new:
                    continue
                ok_old, contrib_old = _log_contrib(
                    pts, n, idx, pts[idx, 0], pts[idx, 1], model, hard2, aux1, aux2, aux3
                )
                if ok_old:
                    accept = math.log(u_acc) < contrib_new - contrib_old
                else:
                    accept = True
                if accept:
                    pts[idx, 0] = x
                    pts[idx, 1] = y
        counts[si] = n
        si += 1
        pos = 0
        slen = n if n > 0 else 1
    state[0] = si
    state[1] = pos
    state[2] = slen
    state[3] = n
    return k


def _model_args(params: PairwiseParams) -> tuple[int, float, float, float, float, float]:
    if isinstance(params, StraussHcParams):
        return (
            _MODEL_STRAUSS,
            math.log(params.activity),
            params.hardcore * params.hardcore,
            params.range_R * params.range_R,
            math.log(params.interaction),
            0.0,
        )
    if isinstance(params, DiggleGrattonParams):
        return (
            _MODEL_DG,
            math.log(params.activity),
            params.delta * params.delta,
            params.delta,
            params.rho,
            params.kappa,
        )
    raise TypeError(f"not a pairwise-interaction parameter set: {type(params).__name__}")


def _hardcore_of(params: PairwiseParams) -> float:
    return params.hardcore if isinstance(params, StraussHcParams) else params.delta


def _capacity(window: Window, hardcore: float) -> int:
    # Hexagonal packing bounds the count of points with pairwise distance
    # >= hardcore; the chain can therefore never overflow this buffer.
    packing = 2.0 * window.area / (math.sqrt(3.0) * hardcore * hardcore)
    return int(packing * 1.2) + 64


def _initial_state(window: Window, params: PairwiseParams, seed: int) -> NDArray[np.float64]:
    h = _hardcore_of(params)
    if params.init_coverage is not None:
        # Inhibition start whose h/2-disc coverage matches the requested
        # value; the chain then only has to relax structure, not density.
        target = int(round(params.init_coverage * window.area / (math.pi * (h / 2) ** 2)))
    else:
        # Smaller of the Poisson guess and a moderately packed pattern;
        # melting down to a sparse equilibrium is fast either way.
        poisson_guess = int(round(params.activity * window.area))
        packed_guess = int(1.8 * window.area / (math.pi * h * h))
        target = min(poisson_guess, packed_guess)
    init = simulate_ssi(
        window, SsiParams(h, target, max_attempts=max(10_000, 200 * max(target, 1))),
        mix_seed(seed, "init"),
    )
    return init.points


def _shift_step_of(window: Window, params: PairwiseParams) -> float:
    if params.shift_scale is not None:
        return params.shift_scale
    h = _hardcore_of(params)
    return h if h > 0 else 0.125 * min(window.width, window.height)


def _run_chain(
    window: Window, params: PairwiseParams, seed: int
) -> tuple[NDArray[np.float64], NDArray[np.int64]]:
    model, log_a, hard2, aux1, aux2, aux3 = _model_args(params)
    cap = _capacity(window, _hardcore_of(params))
    init = _initial_state(window, params, seed)
    pts = np.zeros((cap, 2))
    pts[: len(init)] = init
    state = np.array([0, 0, max(len(init), 1), len(init)], dtype=np.int64)
    counts = np.zeros(params.sweeps, dtype=np.int64)
    rng = rng_from(mix_seed(seed, "chain"))
    while state[0] < params.sweeps:
        block = rng.random(_RAND_BLOCK)
        _chain_advance(
            pts,
            state,
            params.sweeps,
            block,
            model,
            log_a,
            hard2,
            aux1,
            aux2,
            aux3,
            window.xmin,
            window.ymin,
            window.width,
            window.height,
            _shift_step_of(window, params),
            counts,
        )
    return pts[: state[3]].copy(), counts


def simulate_strauss_hc(window: Window, params: StraussHcParams, seed: int) -> Realization:
    pts, _ = _run_chain(window, params, seed)
    return Realization(pts, window, label="strauss", seed=seed)


def simulate_diggle_gratton(
    window: Window, params: DiggleGrattonParams, seed: int
) -> Realization:
    pts, _ = _run_chain(window, params, seed)
    return Realization(pts, window, label="dg", seed=seed)


def chain_count_trace(
    window: Window, params: PairwiseParams, seed: int
) -> NDArray[np.int64]:
    """Point count at the end of each sweep; stationarity diagnostic."""
    _, counts = _run_chain(window, params, seed)
    return counts


_SIMULATORS: dict[type, Callable[..., Realization]] = {
    PoissonParams: simulate_poisson,
    SsiParams: simulate_ssi,
    DeadLeavesParams: simulate_dead_leaves,
    StraussHcParams: simulate_strauss_hc,
    DiggleGrattonParams: simulate_diggle_gratton,
}


def simulate_process(window: Window, params: ProcessParams, seed: int) -> Realization:
    """Dispatch on the parameter type; all simulators share this signature."""
    try:
        sim = _SIMULATORS[type(params)]
    except KeyError:
        raise TypeError(f"unknown parameter type: {type(params).__name__}") from None
    return sim(window, params, seed)


# --------------------------------------------------------------------------
# Densities and conditional intensities (reference implementations)

# These numpy versions exist independently of the jitted chain so the two
# can be checked against each other: papangelou() must equal the ratio of
# exp(log_density) with and without the extra point.


def log_density(points: NDArray[np.float64], params: PairwiseParams) -> float:
    """Log unnormalized density of a configuration (-inf when forbidden)."""
    pts = np.asarray(points, dtype=float).reshape(-1, 2)
    n = len(pts)
    if n == 0:
        return 0.0
    base = n * math.log(params.activity)
    if n == 1:
        return base
    d = pdist(pts)
    if isinstance(params, StraussHcParams):
        if np.any(d < params.hardcore):
            return -math.inf
        s = int(np.count_nonzero(d < params.range_R))
        return base + s * math.log(params.interaction)
    if np.any(d < params.delta):
        return -math.inf
    band = (d >= params.delta) & (d < params.delta + params.rho)
    if not band.any():
        return base
    with np.errstate(divide="ignore"):
        terms = params.kappa * np.log((d[band] - params.delta) / params.rho)
    return base + float(terms.sum())


def papangelou(
    u: NDArray[np.float64], points: NDArray[np.float64], params: PairwiseParams
) -> float:
    """Conditional intensity of adding point u to the configuration."""
    u = np.asarray(u, dtype=float).reshape(2)
    pts = np.asarray(points, dtype=float).reshape(-1, 2)
    if len(pts) == 0:
        return params.activity
    d = cdist(u[None, :], pts)[0]
    if isinstance(params, StraussHcParams):
        if np.any(d < params.hardcore):
            return 0.0
        s = int(np.count_nonzero(d < params.range_R))
        return params.activity * params.interaction**s
    if np.any(d < params.delta):
        return 0.0
    band = (d >= params.delta) & (d < params.delta + params.rho)
    h = np.ones_like(d)
    h[band] = ((d[band] - params.delta) / params.rho) ** params.kappa
    return params.activity * float(np.prod(h))


def papangelou_chain(
    u: NDArray[np.float64], points: NDArray[np.float64], params: PairwiseParams
) -> float:
    """Conditional intensity computed by the jitted kernel's interaction code.

    Same quantity as papangelou(); exists so tests can pin the compiled
    chain's interaction arithmetic against the reference implementation.
    """
    u = np.asarray(u, dtype=float).reshape(2)
    pts = np.ascontiguousarray(np.asarray(points, dtype=float).reshape(-1, 2))
    model, log_a, hard2, aux1, aux2, aux3 = _model_args(params)
    ok, contrib = _log_contrib(
        pts, len(pts), -1, u[0], u[1], model, hard2, aux1, aux2, aux3
    )
    if not ok:
        return 0.0
    return math.exp(log_a + contrib)


# --------------------------------------------------------------------------
# Activity calibration


@dataclass(frozen=True)
class CalibrationResult:
    """Calibrated activity, the pilot coverage it achieved, evaluations used."""

    activity: float
    coverage: float
    evaluations: int


def calibrate_activity(
    make_params: Callable[[float], PairwiseParams],
    window: Window,
    target_coverage: float,
    tol: float,
    seed: int,
    *,
    n_pilot: int = 20,
    margin: float = 2.5,
    disc_radius: float = 1.0,
    grid_step: float = 0.2,
    bracket: tuple[float, float] = (1e-2, 1e2),
    max_iter: int = 40,
) -> CalibrationResult:
    """Bisect log-activity until mean pilot unit-disc coverage hits the target.

    make_params maps an activity to a full parameter set.  Every
    evaluation reuses the same pilot seeds (common random numbers), which
    keeps the coverage curve monotone in activity up to Monte Carlo noise
    and makes the bisection reliable.  Coverage is measured on the window
    eroded by margin to avoid boundary bias.
    """
    if not (0 < target_coverage < 1):
        raise ValueError("target_coverage must be in (0, 1)")
    if tol <= 0:
        raise ValueError("tol must be > 0")
    eroded = erode_window(window, margin)
    pilot_seeds = [mix_seed(seed, "pilot", i) for i in range(n_pilot)]
    evaluations = 0

    def coverage_at(activity: float) -> float:
        nonlocal evaluations
        evaluations += 1
        params = make_params(activity)
        covs = [
            coverage_fraction(
                simulate_process(window, params, s).points, eroded, disc_radius, grid_step
            )
            for s in pilot_seeds
        ]
        return float(np.mean(covs))

    lo, hi = bracket
    if not (0 < lo < hi):
        raise ValueError("bracket must satisfy 0 < lo < hi")

    mid = math.sqrt(lo * hi)
    cov = coverage_at(mid)
    if abs(cov - target_coverage) <= tol:
        return CalibrationResult(mid, cov, evaluations)
    if cov < target_coverage:
        lo, cov_lo = mid, cov
        cov_hi = coverage_at(hi)
        for _ in range(12):
            if cov_hi >= target_coverage:
                break
            hi *= 64.0
            cov_hi = coverage_at(hi)
    else:
        hi, cov_hi = mid, cov
        cov_lo = coverage_at(lo)
        for _ in range(12):
            if cov_lo <= target_coverage:
                break
            lo /= 64.0
            cov_lo = coverage_at(lo)
    if not (cov_lo <= target_coverage <= cov_hi):
        raise CalibrationError(
            f"calibration failed: coverage {target_coverage} not bracketed by "
            f"activities [{lo:g}, {hi:g}] (coverages [{cov_lo:.4f}, {cov_hi:.4f}])"
        )

    for _ in range(max_iter):
        mid = math.sqrt(lo * hi)
        cov = coverage_at(mid)
        if abs(cov - target_coverage) <= tol:
            return CalibrationResult(mid, cov, evaluations)
        if cov < target_coverage:
            lo = mid
        else:
            hi = mid
    raise CalibrationError(
        f"calibration failed: could not reach coverage {target_coverage} "
        f"within tolerance {tol} after {max_iter} bisection steps"
    )
