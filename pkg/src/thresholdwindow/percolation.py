"""Near-critical site percolation on the triangular lattice.

The quad is an n x n rhombus in axial coordinates with the six-neighbor
adjacency (+-1,0), (0,+-1), (+1,-1), (-1,+1).  Transposition is a lattice
automorphism exchanging left-right and top-bottom crossings, so the
left-right open crossing probability at density 1/2 is exactly 1/2, the
sharp invariant the tests rely on.  Flip times come from a full Newman-Ziff
union-find sweep; near-critical and dynamical ensembles, pivotal counts and
the tail-exponent fit are built on top.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from . import kernels, rng
from .coupling import FlipTime

R_CHOICES = ("theoretical", "empirical")


@dataclass(frozen=True)
class PercolationGrid:
    """n x n rhombic patch of the triangular lattice."""

    n: int

    def __post_init__(self):
        if self.n < 2:
            raise ValueError("side length must be >= 2")

    @property
    def num_sites(self) -> int:
        return self.n * self.n

    @property
    def left_column(self) -> np.ndarray:
        return np.arange(self.n) * self.n

    @property
    def right_column(self) -> np.ndarray:
        return np.arange(self.n) * self.n + self.n - 1

    def neighbors(self, site: int):
        r, c = divmod(site, self.n)
        out = []
        for dr, dc in kernels.NEIGHBOR_OFFSETS:
            nr, nc = r + dr, c + dc
            if 0 <= nr < self.n and 0 <= nc < self.n:
                out.append(nr * self.n + nc)
        return out


@dataclass(frozen=True)
class NearCriticalParams:
    """Window parameter and the choice of window-width normalization."""

    lam: float
    r_choice: str = "empirical"

    def __post_init__(self):
        if self.r_choice not in R_CHOICES:
            raise ValueError(f"r_choice must be one of {R_CHOICES}")


def build_lattice(n: int) -> PercolationGrid:
    """Rhombic n x n grid; interior sites have six neighbors."""
    return PercolationGrid(n=n)


def _as_mask(grid: PercolationGrid, open_sites) -> np.ndarray:
    if callable(open_sites):
        mask = np.fromiter((bool(open_sites(s)) for s in range(grid.num_sites)),
                           dtype=bool, count=grid.num_sites)
    else:
        mask = np.asarray(open_sites, dtype=bool).reshape(grid.num_sites)
    return np.ascontiguousarray(mask.astype(np.uint8))


def has_crossing(grid: PercolationGrid, open_sites) -> bool:
    """Left-to-right open crossing under a site mask or predicate."""
    return bool(kernels.crossing_exists(_as_mask(grid, open_sites), grid.n))


@dataclass(frozen=True)
class CrossingFlip:
    """Flip time of the crossing event plus Newman-Ziff work counters."""

    value: float
    pivotal_bit: Optional[int]
    insertions: int
    unions: int

    def as_flip_time(self) -> FlipTime:
        return FlipTime(self.value, self.pivotal_bit)


def crossing_flip_time(grid: PercolationGrid, labels: np.ndarray) -> CrossingFlip:
    """Insert sites in increasing label order until the walls connect.

    The sweep always completes all n^2 insertions (the instrumentation
    invariant), recording the label at which the left and right walls first
    join.  A crossing always exists at full density, so this cannot fail.
    """
    labels = np.ascontiguousarray(labels, dtype=np.float64)
    if labels.size != grid.num_sites:
        raise ValueError("need one label per site")
    order = np.argsort(labels, kind="stable").astype(np.int64)
    t, pivot, insertions, unions = kernels.percolation_flip_time(
        labels, order, grid.n)
    return CrossingFlip(value=float(t), pivotal_bit=int(pivot),
                        insertions=int(insertions), unions=int(unions))


def dual_mask(mask: np.ndarray, n: int) -> np.ndarray:
    """Color swap plus transpose: open crossings of the dual mask are the
    complements of the original's closed top-bottom crossings."""
    grid = np.asarray(mask, dtype=np.uint8).reshape(n, n)
    return np.ascontiguousarray((1 - grid).T)


def pivotal_count(grid: PercolationGrid, open_sites, method: str = "fast") -> int:
    """Number of sites whose flip changes the crossing indicator.

    fast: union-find bridging rule (color-swapped when a crossing exists);
    brute: flip every site and recheck.  Both are exact; tests assert they
    agree.
    """
    mask = _as_mask(grid, open_sites)
    n = grid.n
    if method == "brute":
        base = kernels.crossing_exists(mask, n)
        count = 0
        for s in range(grid.num_sites):
            mask[s] ^= 1
            if kernels.crossing_exists(mask, n) != base:
                count += 1
            mask[s] ^= 1
        return count
    if method != "fast":
        raise ValueError("method must be 'fast' or 'brute'")
    count = kernels.bridging_pivotal_count(mask, n)
    if count >= 0:
        return count
    dual = dual_mask(mask, n).reshape(-1)
    count = kernels.bridging_pivotal_count(np.ascontiguousarray(dual), n)
    if count < 0:
        raise RuntimeError("both a crossing and a dual crossing reported")
    return count


@dataclass(frozen=True)
class PivotalEstimate:
    mean: float
    stderr: float
    n: int
    num_samples: int


def estimate_pivotal_count(n: int, num_samples: int, seed: int,
                           method: str = "fast",
                           brute_cap: int = 128) -> PivotalEstimate:
    """Mean pivotal-site count at density 1/2 with its standard error."""
    if method == "brute" and n > brute_cap:
        raise ValueError(f"brute-force pivotal counting capped at n={brute_cap}")
    grid = build_lattice(n)
    counts = np.empty(num_samples, dtype=float)
    for k in range(num_samples):
        mask = (rng.stream(seed, k).random(grid.num_sites) <= 0.5)
        counts[k] = pivotal_count(grid, mask, method=method)
    se = counts.std(ddof=1) / math.sqrt(num_samples) if num_samples > 1 else 0.0
    return PivotalEstimate(mean=float(counts.mean()), stderr=float(se),
                           n=n, num_samples=num_samples)


_WIDTH_CACHE: dict = {}


def window_width(n: int, r_choice: str = "empirical", *,
                 pivotal_samples: int = 200, seed: int = 0) -> float:
    """Near-critical window width r(n).

    theoretical: n^(-3/4); empirical (default): 1 / (estimated mean pivotal
    count at density 1/2), which collapses finite-size effects better.
    """
    if r_choice == "theoretical":
        return float(n) ** (-0.75)
    if r_choice != "empirical":
        raise ValueError(f"r_choice must be one of {R_CHOICES}")
    key = (n, pivotal_samples, seed)
    if key not in _WIDTH_CACHE:
        est = estimate_pivotal_count(n, pivotal_samples,
                                     rng.stream_seed(seed, 0xA11CE))
        _WIDTH_CACHE[key] = 1.0 / est.mean
    return _WIDTH_CACHE[key]


@dataclass(frozen=True)
class CrossingProbPoint:
    lam: float
    estimate: float
    stderr: float


def near_critical_crossing_curve(n: int, lams, r_choice: str, num_samples: int,
                                 seed: int, estimator: str = "raw"):
    """Estimates of the crossing probability at densities 1/2 + lam * r(n).

    One flip time per sample serves every lam (common random numbers), so the
    curve is exactly nondecreasing in lam.  estimator='paired' averages each
    sample with its color-swapped transpose (whose flip time is 1 - T),
    making f(lam) + f(-lam) = 1 an exact identity.
    """
    lams = np.atleast_1d(np.asarray(lams, dtype=float))
    r = window_width(n, r_choice)
    if np.any(np.abs(lams) * r > 0.5):
        raise ValueError("|lam| r(n) must stay within [0, 1/2]")
    if estimator not in ("raw", "paired"):
        raise ValueError("estimator must be 'raw' or 'paired'")
    grid = build_lattice(n)
    times = np.empty(num_samples, dtype=float)
    for k in range(num_samples):
        labels = rng.stream(seed, k).random(grid.num_sites)
        times[k] = crossing_flip_time(grid, labels).value
    points = []
    for lam in lams:
        p = 0.5 + lam * r
        ind = (times <= p).astype(float)
        if estimator == "paired":
            vals = 0.5 * (ind + (times >= 1.0 - p))
        else:
            vals = ind
        est = float(vals.mean())
        se = float(vals.std(ddof=1) / math.sqrt(num_samples)) if num_samples > 1 else 0.0
        points.append(CrossingProbPoint(lam=float(lam), estimate=est, stderr=se))
    return points, r


def near_critical_crossing_prob(n: int, lam: float, r_choice: str,
                                num_samples: int, seed: int,
                                estimator: str = "raw") -> CrossingProbPoint:
    """Single-lam version of `near_critical_crossing_curve`."""
    points, _ = near_critical_crossing_curve(n, [lam], r_choice, num_samples,
                                             seed, estimator)
    return points[0]


@dataclass(frozen=True)
class TailFit:
    slope: float
    intercept: float
    residual_norm: float
    lams_used: np.ndarray
    warning: Optional[str] = None


def tail_exponent_fit(lams, fhat_values) -> TailFit:
    """Least squares of log(-log fhat) against log lam.

    ``fhat_values`` are lower-tail crossing probabilities (at -lam); zeros
    are excluded with a warning since the Monte Carlo resolution ran out.
    """
    lams = np.asarray(lams, dtype=float)
    fh = np.asarray(fhat_values, dtype=float)
    warning = None
    keep = fh > 0.0
    if not np.all(keep):
        warning = (f"excluded {int(np.count_nonzero(~keep))} zero estimates "
                   "(insufficient Monte Carlo resolution)")
    keep &= (fh < 0.4) & (lams > 0.0)
    if np.count_nonzero(keep) < 4:
        raise ValueError("need at least 4 usable points with fhat in (0, 0.4)")
    x = np.log(lams[keep])
    y = np.log(-np.log(fh[keep]))
    coeffs, residuals, *_ = np.polyfit(x, y, 1, full=True)
    res = float(np.sqrt(residuals[0])) if len(residuals) else 0.0
    return TailFit(slope=float(coeffs[0]), intercept=float(coeffs[1]),
                   residual_norm=res, lams_used=lams[keep], warning=warning)


@dataclass(frozen=True)
class NoCrossingPoint:
    t: float
    estimate: float
    stderr: float


def dynamical_no_crossing_prob(n: int, ts, r_choice: str, num_samples: int,
                               seed: int):
    """Probability that the crossing is absent throughout [0, t].

    Stationary dynamics: start at density 1/2 and ring each site's
    exponential clock at rate r(n), resampling the site to open with
    probability 1/2.  One trajectory per sample is run to max(ts) and its
    first crossing moment serves every t, so the curve is nonincreasing by
    construction.
    """
    ts = np.atleast_1d(np.asarray(ts, dtype=float))
    if np.any(ts < 0):
        raise ValueError("times must be nonnegative")
    t_max = float(ts.max())
    r = window_width(n, r_choice)
    grid = build_lattice(n)
    total_rate = grid.num_sites * r
    first_cross = np.empty(num_samples, dtype=float)
    for k in range(num_samples):
        gen = rng.stream(seed, k)
        state = (gen.random(grid.num_sites) <= 0.5).astype(np.uint8)
        first_cross[k] = _first_crossing_moment(grid, state, gen, total_rate, t_max)
    points = []
    for t in ts:
        ind = (first_cross > t).astype(float)
        est = float(ind.mean())
        se = float(ind.std(ddof=1) / math.sqrt(num_samples)) if num_samples > 1 else 0.0
        points.append(NoCrossingPoint(t=float(t), estimate=est, stderr=se))
    return points, r


def _first_crossing_moment(grid, state, gen, total_rate, t_max):
    """First time in [0, t_max] at which a crossing exists (inf if none)."""
    if has_crossing(grid, state):
        return 0.0
    if t_max == 0.0:
        return math.inf
    clock = 0.0
    chunk = max(64, int(1.3 * total_rate * t_max) + 1)
    times = []
    while clock < t_max:
        gaps = gen.exponential(scale=1.0 / total_rate, size=chunk)
        for g in gaps:
            clock += g
            if clock >= t_max:
                break
            times.append(clock)
        chunk = 64
    if not times:
        return math.inf
    count = len(times)
    sites = gen.integers(0, grid.num_sites, size=count).astype(np.int64)
    opens = (gen.random(count) <= 0.5).astype(np.uint8)
    hit = kernels.dynamical_first_crossing(state, grid.n, sites, opens)
    if hit < 0:
        return 0.0       # cannot happen: initial crossing was checked above
    if hit >= count:
        return math.inf
    return times[hit]
