"""Universal-limit constructions: monotone functions whose rescaled flip times
converge to any prescribed finitely-supported measure.

The plain construction intersects global ones-count events with ones-count
events on a small leading block whose thresholds are Gaussian quantiles of the
target weights.  The transitive construction replaces the block events with
rotation-invariant circular-window dominance events F(y), whose threshold
strings y are calibrated by Monte Carlo at density 1/2.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from . import kernels, rng
from .coupling import MonotoneFunction
from .errors import CalibrationError, NoFlipError
from .normal import norm_ppf

MAX_WINDOW_BITS = 62   # window integers are packed into int64


@dataclass(frozen=True)
class FiniteMeasure:
    """Finitely supported probability measure: atoms (x_i, q_i)."""

    atoms: tuple

    def __post_init__(self):
        xs = [x for x, _ in self.atoms]
        qs = [q for _, q in self.atoms]
        if not xs:
            raise ValueError("measure needs at least one atom")
        if any(q <= 0 for q in qs):
            raise ValueError("atom weights must be positive")
        if abs(sum(qs) - 1.0) > 1e-12:
            raise ValueError("atom weights must sum to 1")
        if any(b <= a for a, b in zip(xs, xs[1:])):
            raise ValueError("atom positions must be strictly increasing")

    @classmethod
    def from_pairs(cls, pairs: Sequence) -> "FiniteMeasure":
        return cls(atoms=tuple((float(x), float(q)) for x, q in pairs))

    @property
    def positions(self) -> np.ndarray:
        return np.array([x for x, _ in self.atoms])

    @property
    def weights(self) -> np.ndarray:
        return np.array([q for _, q in self.atoms])

    def cdf(self, x):
        xs = np.asarray(x, dtype=float)
        out = np.zeros_like(xs, dtype=float)
        for pos, q in self.atoms:
            out = out + q * (xs >= pos)
        return float(out) if out.ndim == 0 else out


@dataclass(frozen=True)
class ScalingReport:
    """Outcome of the admissibility check on a scaling sequence value."""

    ok: bool
    warnings: tuple = ()


def validate_scaling(a_n: float, n: int, transitive: bool) -> ScalingReport:
    """Check a_n against the admissible window for the construction.

    Hard errors (ValueError) for a_n <= 0 or a_n > n; warnings when a_n falls
    outside [1, sqrt(n)] (plain) or [log n, sqrt(n)] (transitive).
    """
    if n < 4:
        raise ValueError("need at least 4 bits")
    if a_n <= 0:
        raise ValueError("scale must be positive")
    if a_n > n:
        raise ValueError("scale beyond the bit count cannot give a limit")
    warnings = []
    root = math.sqrt(n)
    if transitive:
        if a_n < math.log(n):
            warnings.append(f"a_n={a_n:g} below log n={math.log(n):.3f}: "
                            "transitive lower constraint violated")
    elif a_n < 1.0:
        warnings.append(f"a_n={a_n:g} below 1: plain lower constraint violated")
    if a_n > root:
        warnings.append(f"a_n={a_n:g} above sqrt(n)={root:.3f}: "
                        "upper constraint violated")
    return ScalingReport(ok=not warnings, warnings=tuple(warnings))


def gaussian_quantiles(measure: FiniteMeasure) -> np.ndarray:
    """Block thresholds y_i with 1 - Phi(y_i) = q_1 + ... + q_i.

    The last entry is always -inf (the final block event is the whole space).
    """
    cum = np.cumsum(measure.weights)
    out = np.array([norm_ppf(min(max(1.0 - c, 0.0), 1.0)) for c in cum])
    out[-1] = -math.inf    # the final block event is the whole space
    return out


def _count_threshold(total: int, proportion: float) -> int:
    """Smallest integer count c with c/total >= proportion."""
    if proportion == -math.inf:
        return 0
    return math.ceil(proportion * total)


@dataclass(frozen=True)
class ConstructionSpec:
    """Descriptor of a built function, sufficient to rebuild or audit it."""

    mode: str
    n: int
    a_n: float
    measure: FiniteMeasure
    global_thresholds: tuple
    block_size: int = 0
    block_thresholds: tuple = ()
    window_length: int = 0
    window_strings: tuple = ()
    calibration: dict = field(default_factory=dict)
    scaling_warnings: tuple = ()


class PlainThresholdFunction(MonotoneFunction):
    """Union over atoms of (global ones-count event) AND (block event)."""

    family = "constructed-plain"

    def __init__(self, measure: FiniteMeasure, n: int, a_n: float):
        super().__init__(n)
        report = validate_scaling(a_n, n, transitive=False)
        block = math.floor(a_n)
        if block < 1:
            raise ValueError("floor(a_n) must be at least 1")
        self.measure = measure
        self.a_n = float(a_n)
        self.block = block
        ys = gaussian_quantiles(measure)
        self.global_thresholds = tuple(
            _count_threshold(n, 0.5 + x / a_n) for x in measure.positions)
        self.block_thresholds = tuple(
            _count_threshold(block, 0.5 + y / (2.0 * math.sqrt(a_n))) for y in ys)
        self.descriptor = ConstructionSpec(
            mode="plain", n=n, a_n=float(a_n), measure=measure,
            global_thresholds=self.global_thresholds,
            block_size=block, block_thresholds=self.block_thresholds,
            scaling_warnings=report.warnings)

    def evaluate(self, bits):
        bits = np.asarray(bits, dtype=bool)
        total = int(np.count_nonzero(bits))
        block = int(np.count_nonzero(bits[:self.block]))
        return int(any(total >= kg and block >= kb
                       for kg, kb in zip(self.global_thresholds,
                                         self.block_thresholds)))

    def incremental_state(self):
        return _PlainState(self.block, self.global_thresholds, self.block_thresholds)

    def flip_time_from_labels(self, labels):
        labels = np.asarray(labels, dtype=float)
        best = math.inf
        for kg, kb in zip(self.global_thresholds, self.block_thresholds):
            tg = _order_stat(labels, kg)
            tb = _order_stat(labels[:self.block], kb)
            best = min(best, max(tg, tb))
        if math.isinf(best):
            raise NoFlipError("no atom event is satisfiable at full density")
        return best

    def pivotal_class_split(self, bits):
        bits = np.asarray(bits, dtype=bool)
        base = self.evaluate(bits)
        counts = np.zeros(2)
        for i in range(self.n):
            flipped = bits.copy()
            flipped[i] = not flipped[i]
            if self.evaluate(flipped) != base:
                counts[0 if i < self.block else 1] += 1.0
        return counts

    def symmetry_classes(self):
        cls = np.ones(self.n, dtype=np.int64)
        cls[:self.block] = 0
        return cls


def _order_stat(labels, k):
    """k-th smallest label (1-indexed); 0 when k <= 0, inf when k > len."""
    if k <= 0:
        return 0.0
    if k > len(labels):
        return math.inf
    return float(np.partition(labels, k - 1)[k - 1])


class _PlainState:
    __slots__ = ("block", "kg", "kb", "total", "in_block", "output")

    def __init__(self, block, kg, kb):
        self.block = block
        self.kg = kg
        self.kb = kb
        self.total = 0
        self.in_block = 0
        self.output = 0

    def insert(self, i):
        self.total += 1
        if i < self.block:
            self.in_block += 1
        if not self.output:
            for kg, kb in zip(self.kg, self.kb):
                if self.total >= kg and self.in_block >= kb:
                    self.output = 1
                    break
        return self.output


# ---------------------------------------------------------------------------
# transitive construction


def window_string_to_int(y: str) -> int:
    """Packed integer of a binary string, most significant bit first."""
    if any(ch not in "01" for ch in y):
        raise ValueError("threshold strings are binary")
    return int(y, 2) if y else 0


def window_int_to_string(value: int, ell: int) -> str:
    return format(value, f"0{ell}b")


def interval_dominance_prob(y, n: int, ell: int, p: float,
                            num_samples: int, seed: int):
    """Monte Carlo estimate of P_p(some circular ell-window dominates y).

    Dominance is in the total order packing windows as integers (MSB first),
    so the event is {max window integer >= int(y)}.  Returns (estimate,
    stderr).
    """
    y_int = window_string_to_int(y) if isinstance(y, str) else int(y)
    if ell > n:
        raise ValueError("window cannot exceed the circle")
    if ell > MAX_WINDOW_BITS:
        raise ValueError(f"window length capped at {MAX_WINDOW_BITS} bits")
    hits = 0
    for k in range(num_samples):
        bits = (rng.stream(seed, k).random(n) <= p).astype(np.uint8)
        if kernels.max_window_value(bits, ell) >= y_int:
            hits += 1
    est = hits / num_samples
    return est, math.sqrt(max(est * (1.0 - est), 1e-300) / num_samples)


def _sample_window_maxima(n: int, ell: int, num_samples: int, seed: int):
    if ell > n:
        raise ValueError("window cannot exceed the circle")
    if ell > MAX_WINDOW_BITS:
        raise ValueError(f"window length capped at {MAX_WINDOW_BITS} bits")
    out = np.empty(num_samples, dtype=np.int64)
    for k in range(num_samples):
        bits = (rng.stream(seed, k).random(n) <= 0.5).astype(np.uint8)
        out[k] = kernels.max_window_value(bits, ell)
    return out


def find_threshold_string(q: float, n: int, ell: int, num_samples: int,
                          seed: int):
    """Largest y with estimated P_1/2(some window dominates y) >= q.

    Calibrated from one common-random-numbers sample of max-window integers;
    returns (y_string, info) where info carries the achieved estimate, its
    stderr, and a warning when the Monte Carlo budget cannot resolve 2/n.
    """
    if not 0.0 < q < 1.0:
        raise ValueError("target probability must lie in (0, 1)")
    maxima = _sample_window_maxima(n, ell, num_samples, seed)
    return _threshold_from_maxima(maxima, q, n, ell)


def _threshold_from_maxima(maxima: np.ndarray, q: float, n: int, ell: int):
    num = len(maxima)
    rank = math.ceil(q * num)
    if rank > num:
        rank = num
    y_int = int(np.partition(maxima, num - rank)[num - rank])  # rank-th largest
    est = float(np.count_nonzero(maxima >= y_int)) / num
    se = math.sqrt(max(est * (1.0 - est), 1e-300) / num)
    info = {"estimate": est, "stderr": se, "target": q,
            "tolerance": max(2.0 / n, 3.0 * se), "warning": None}
    if 3.0 * se > 2.0 / n:
        info["warning"] = (f"budget {num} resolves only {3 * se:.2e} "
                           f"but 2/n = {2 / n:.2e}")
    return window_int_to_string(y_int, ell), info


class TransitiveWindowFunction(MonotoneFunction):
    """Union over atoms of (global ones-count event) AND (circular-window
    dominance event); rotation invariant by construction."""

    family = "constructed-transitive"

    def __init__(self, measure: FiniteMeasure, n: int, a_n: float,
                 window_length: int, global_thresholds, window_ints,
                 descriptor: ConstructionSpec):
        super().__init__(n)
        self.measure = measure
        self.a_n = float(a_n)
        self.ell = window_length
        self.global_thresholds = tuple(global_thresholds)
        self.window_ints = tuple(window_ints)   # one per atom; 0 means always
        self.descriptor = descriptor

    def evaluate(self, bits):
        bits = np.asarray(bits, dtype=bool)
        total = int(np.count_nonzero(bits))
        max_win = None
        for kg, y in zip(self.global_thresholds, self.window_ints):
            if total < kg:
                continue
            if y <= 0:
                return 1
            if max_win is None:
                max_win = kernels.max_window_value(bits.astype(np.uint8), self.ell)
            if max_win >= y:
                return 1
        return 0

    def incremental_state(self):
        return _WindowState(self.n, self.ell, self.global_thresholds,
                            self.window_ints)

    def flip_time_from_labels(self, labels):
        labels = np.asarray(labels, dtype=float)
        finite = sorted({y for y in self.window_ints if y > 0})
        window_times = {0: 0.0}
        if finite:
            order = np.argsort(labels, kind="stable").astype(np.int64)
            out = np.empty(len(finite), dtype=float)
            kernels.window_flip_times(labels, order, self.ell,
                                      np.array(finite, dtype=np.int64), out)
            for y, t in zip(finite, out):
                window_times[y] = float(t) if not math.isnan(t) else math.inf
        best = math.inf
        for kg, y in zip(self.global_thresholds, self.window_ints):
            tg = _order_stat(labels, kg)
            tw = window_times[y] if y > 0 else 0.0
            best = min(best, max(tg, tw))
        if math.isinf(best):
            raise NoFlipError("no atom event is satisfiable at full density")
        return best

    def symmetry_classes(self):
        return np.zeros(self.n, dtype=np.int64)


class _WindowState:
    __slots__ = ("n", "ell", "kg", "ys", "total", "win", "best_win", "output")

    def __init__(self, n, ell, kg, ys):
        self.n = n
        self.ell = ell
        self.kg = kg
        self.ys = ys
        self.total = 0
        self.win = np.zeros(n, dtype=np.int64)
        self.best_win = 0
        self.output = int(any(g <= 0 and y <= 0 for g, y in zip(kg, ys)))

    def insert(self, i):
        self.total += 1
        n, ell = self.n, self.ell
        for o in range(ell):
            w = (i - o) % n
            self.win[w] |= 1 << (ell - 1 - o)
            if self.win[w] > self.best_win:
                self.best_win = int(self.win[w])
        if not self.output:
            for kg, y in zip(self.kg, self.ys):
                if self.total >= kg and self.best_win >= y:
                    self.output = 1
                    break
        return self.output


def build_plain(measure: FiniteMeasure, n: int, a_n: float) -> PlainThresholdFunction:
    """Plain universal-limit construction; see PlainThresholdFunction."""
    return PlainThresholdFunction(measure, n, a_n)


def build_transitive(measure: FiniteMeasure, n: int, a_n: float,
                     calibration_budget: int, seed: int) -> TransitiveWindowFunction:
    """Transitive construction with Monte Carlo calibrated window strings.

    All atoms are calibrated from one common sample of max-window integers at
    density 1/2, which makes the threshold chain nonincreasing automatically.
    """
    report = validate_scaling(a_n, n, transitive=True)
    ell = int(math.floor(2.0 * math.log2(n)))
    if ell < 1 or ell > n:
        raise CalibrationError(f"window length {ell} invalid for n={n}")
    if ell > MAX_WINDOW_BITS:
        raise CalibrationError(
            f"window length {ell} exceeds the {MAX_WINDOW_BITS}-bit packing cap")
    if calibration_budget < 2:
        raise CalibrationError("calibration budget must be at least 2")
    cum = np.cumsum(measure.weights)
    maxima = _sample_window_maxima(n, ell, calibration_budget, seed)
    window_ints = []
    strings = []
    calibration = {"budget": calibration_budget, "seed": seed, "atoms": []}
    for i, c in enumerate(cum):
        if i == len(cum) - 1:
            window_ints.append(0)      # -inf sentinel: whole space
            strings.append("0" * ell)
            calibration["atoms"].append({"target": float(c), "sentinel": True})
            continue
        y_str, info = _threshold_from_maxima(maxima, float(c), n, ell)
        window_ints.append(window_string_to_int(y_str))
        strings.append(y_str)
        calibration["atoms"].append({"target": float(c), **info})
    for a, b in zip(window_ints, window_ints[1:]):
        if b > a and b != 0:
            raise CalibrationError("threshold chain is not nonincreasing",
                                   details=calibration)
    global_thresholds = tuple(
        _count_threshold(n, 0.5 + x / a_n) for x in measure.positions)
    descriptor = ConstructionSpec(
        mode="transitive", n=n, a_n=float(a_n), measure=measure,
        global_thresholds=global_thresholds, window_length=ell,
        window_strings=tuple(strings), calibration=calibration,
        scaling_warnings=report.warnings)
    return TransitiveWindowFunction(measure, n, a_n, ell, global_thresholds,
                                    window_ints, descriptor)
