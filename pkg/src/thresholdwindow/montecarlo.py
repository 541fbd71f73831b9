"""Batch flip-time sampling, rescaling, empirical CDFs, KS/DKW comparison,
and influence estimation.

Sample k of a run always uses the Philox stream derived from
(base_seed, k) — see `rng` — so results are reproducible bit-for-bit and
independent of worker count.
"""

from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from . import rng
from .coupling import MonotoneFunction
from .families import AnalyticLimit, FamilySpec, make_family


@dataclass(frozen=True)
class FlipTimeSample:
    """A batch of flip-time draws plus the rescaling applied to them."""

    values: np.ndarray
    n: int
    family: Optional[FamilySpec]
    base_seed: int
    a_n: Optional[float] = None
    b_n: Optional[float] = None

    @property
    def size(self) -> int:
        return len(self.values)


class EmpiricalCdf:
    """Step CDF of a sample; callable at scalar or array arguments."""

    def __init__(self, values):
        self.values = np.sort(np.asarray(values, dtype=float))
        if self.values.size == 0:
            raise ValueError("empty sample")

    def __call__(self, x):
        frac = np.searchsorted(self.values, np.asarray(x, dtype=float),
                               side="right") / self.values.size
        return float(frac) if np.ndim(x) == 0 else frac


def _resolve(function_or_spec) -> MonotoneFunction:
    if isinstance(function_or_spec, FamilySpec):
        return make_family(function_or_spec)
    return function_or_spec


def _sample_chunk(args):
    f, base_seed, start, stop = args
    out = np.empty(stop - start, dtype=float)
    for k in range(start, stop):
        labels = rng.stream(base_seed, k).random(f.n)
        out[k - start] = f.flip_time_from_labels(labels)
    return start, out


def sample_flip_times(function_or_spec, num_samples: int, base_seed: int,
                      workers: int = 1) -> FlipTimeSample:
    """Draw independent flip times; sample k comes from stream (base_seed, k).

    Accepts a FamilySpec or any MonotoneFunction.  The result does not depend
    on ``workers``; NoFlipError propagates for constant-zero functions.
    """
    if num_samples < 1:
        raise ValueError("need at least one sample")
    f = _resolve(function_or_spec)
    spec = function_or_spec if isinstance(function_or_spec, FamilySpec) else None
    values = np.empty(num_samples, dtype=float)
    if workers <= 1:
        _, chunk = _sample_chunk((f, base_seed, 0, num_samples))
        values[:] = chunk
    else:
        bounds = np.linspace(0, num_samples, workers + 1).astype(int)
        jobs = [(f, base_seed, int(a), int(b))
                for a, b in zip(bounds[:-1], bounds[1:]) if b > a]
        with ProcessPoolExecutor(max_workers=workers) as pool:
            for start, chunk in pool.map(_sample_chunk, jobs):
                values[start:start + len(chunk)] = chunk
    return FlipTimeSample(values=values, n=f.n, family=spec, base_seed=base_seed)


def rescale(sample: FlipTimeSample, a_n: float, b_n: float) -> FlipTimeSample:
    """Map the draws x -> a_n (x - b_n), recording the normalization."""
    if a_n <= 0:
        raise ValueError("scale factor must be positive")
    return FlipTimeSample(values=a_n * (sample.values - b_n), n=sample.n,
                          family=sample.family, base_seed=sample.base_seed,
                          a_n=a_n, b_n=b_n)


def ks_distance(ecdf: EmpiricalCdf, limit) -> float:
    """sup_x |ecdf - F| over the sample's jump points, both sides of each jump
    (the lower side compares against the left limit of F, so step laws with
    matching jumps score zero).

    ``limit`` may be an AnalyticLimit or a plain CDF callable.
    """
    cdf = limit.cdf if isinstance(limit, AnalyticLimit) else limit
    v = ecdf.values
    num = v.size
    fv = np.asarray(cdf(v), dtype=float)
    fv_left = np.asarray(cdf(np.nextafter(v, -np.inf)), dtype=float)
    upper = np.arange(1, num + 1) / num
    lower = np.arange(0, num) / num
    return float(np.max(np.maximum(np.abs(upper - fv), np.abs(lower - fv_left))))


def dkw_bound(num_samples: int, confidence: float) -> float:
    """Dvoretzky-Kiefer-Wolfowitz band: sqrt(log(2/(1-confidence)) / (2 N))."""
    if num_samples < 1:
        raise ValueError("need at least one sample")
    if not 0.0 < confidence < 1.0:
        raise ValueError("confidence must lie in (0, 1)")
    return math.sqrt(math.log(2.0 / (1.0 - confidence)) / (2.0 * num_samples))


@dataclass(frozen=True)
class InfluenceEstimate:
    """Monte Carlo pivotality estimates aggregated by symmetry class."""

    total: float
    total_stderr: float
    class_rates: np.ndarray       # per-bit pivotal probability, one per class
    class_stderr: np.ndarray
    class_sizes: np.ndarray
    num_samples: int = field(default=0)


def estimate_influence(function_or_spec, p: float, num_samples: int,
                       base_seed: int) -> InfluenceEstimate:
    """Estimate per-class and total influence at density p.

    Each of the N configurations is drawn at density p from its own stream;
    pivotal bits are counted exactly per configuration (family fast paths or
    flip-and-reevaluate).
    """
    if not 0.0 < p < 1.0:
        raise ValueError("density must lie in (0, 1)")
    f = _resolve(function_or_spec)
    classes = f.symmetry_classes()
    if classes is None:
        classes = np.arange(f.n, dtype=np.int64)
    num_classes = int(classes.max()) + 1
    sizes = np.bincount(classes, minlength=num_classes).astype(float)
    totals = np.empty(num_samples, dtype=float)
    per_class = np.zeros((num_samples, num_classes), dtype=float)
    single_class = num_classes == 1
    for k in range(num_samples):
        bits = rng.stream(base_seed, k).random(f.n) <= p
        if single_class:
            c = float(f.pivotal_count(bits))
            totals[k] = c
            per_class[k, 0] = c
        else:
            counts = pivotal_class_counts(f, bits, classes, num_classes)
            per_class[k] = counts
            totals[k] = counts.sum()
    total = float(totals.mean())
    total_se = float(totals.std(ddof=1) / math.sqrt(num_samples)) if num_samples > 1 else 0.0
    rates = per_class.mean(axis=0) / sizes
    rate_se = (per_class.std(axis=0, ddof=1) / math.sqrt(num_samples) / sizes
               if num_samples > 1 else np.zeros(num_classes))
    return InfluenceEstimate(total=total, total_stderr=total_se,
                             class_rates=rates, class_stderr=rate_se,
                             class_sizes=sizes, num_samples=num_samples)


def pivotal_class_counts(f: MonotoneFunction, bits, classes, num_classes):
    """Pivotal-bit counts per symmetry class (family shortcut when exact
    class attribution is available, else flip-and-reevaluate)."""
    split = getattr(f, "pivotal_class_split", None)
    if split is not None:
        return np.asarray(split(bits), dtype=float)
    bits = np.asarray(bits, dtype=bool)
    base = f.evaluate(bits)
    counts = np.zeros(num_classes, dtype=float)
    for i in range(f.n):
        flipped = bits.copy()
        flipped[i] = not flipped[i]
        if f.evaluate(flipped) != base:
            counts[classes[i]] += 1.0
    return counts
