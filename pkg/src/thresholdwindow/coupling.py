"""Canonical monotone coupling and flip times.

One array of i.i.d. Uniform[0,1] labels drives every density at once: the
configuration at density p opens exactly the bits whose label is <= p, so
configurations are nested in p and any monotone Boolean function of them flips
from 0 to 1 at a single random point, its flip time.  This module houses the
label plumbing, the function protocol, the flip-time computation (incremental
insertion with a binary-search fallback), the witness-based oracle, and
function reversal.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from . import rng
from .errors import NoFlipError


@dataclass(frozen=True)
class LabelAssignment:
    """Uniform labels attached to the n bits; reproducible from (n, seed)."""

    n: int
    labels: np.ndarray
    seed: int

    def __post_init__(self):
        if self.n < 1:
            raise ValueError("bit count must be >= 1")
        if self.labels.shape != (self.n,):
            raise ValueError("label array must have length n")


@dataclass(frozen=True)
class BitConfig:
    """A point of {0,1}^n; ``bits`` is a boolean array."""

    n: int
    bits: np.ndarray

    def __post_init__(self):
        if self.bits.shape != (self.n,):
            raise ValueError("bit array must have length n")


@dataclass(frozen=True)
class FlipTime:
    """Flip point of a monotone function along the coupling.

    ``pivotal_bit`` is the index whose insertion flipped the output; it is
    None when the function is already 1 on the empty configuration.
    """

    value: float
    pivotal_bit: Optional[int]


def assign_uniform_labels(n: int, seed: int) -> LabelAssignment:
    """Draw n labels from the Philox stream for ``seed`` (see `rng`)."""
    if n < 1:
        raise ValueError("bit count must be >= 1")
    labels = rng.generator(seed).random(n)
    return LabelAssignment(n=n, labels=labels, seed=seed)


def configuration_at(labels: LabelAssignment, p: float) -> BitConfig:
    """Configuration with bit i open iff labels[i] <= p; monotone in p."""
    if not 0.0 <= p <= 1.0:
        raise ValueError("density must lie in [0, 1]")
    return BitConfig(n=labels.n, bits=labels.labels <= p)


class MonotoneFunction:
    """A monotone Boolean function on n bits.

    Subclasses implement ``evaluate`` on a boolean array and usually provide
    incremental insertion support via ``incremental_state``; families with a
    closed-form shortcut override ``flip_time_from_labels`` (the override must
    agree exactly with the generic path, which the tests enforce).
    """

    family = "custom"

    def __init__(self, n: int):
        if n < 1:
            raise ValueError("bit count must be >= 1")
        self.n = n

    def __call__(self, config) -> int:
        bits = config.bits if isinstance(config, BitConfig) else config
        return self.evaluate(np.asarray(bits, dtype=bool))

    def evaluate(self, bits: np.ndarray) -> int:
        raise NotImplementedError

    def incremental_state(self):
        """Insertion state starting from all-zeros, or None if unsupported.

        A state has an ``output`` attribute and an ``insert(i)`` method that
        turns bit i on and returns the new output.
        """
        return None

    def one_witnesses(self) -> Optional[Sequence[np.ndarray]]:
        """Minimal sets forcing output 1, when enumerable."""
        return None

    def zero_witnesses(self) -> Optional[Sequence[np.ndarray]]:
        """Minimal sets forcing output 0, when enumerable."""
        return None

    def flip_time_from_labels(self, labels: np.ndarray) -> float:
        """Flip-time value for a raw label array (family fast paths override)."""
        return flip_time(self, LabelAssignment(self.n, np.asarray(labels, float), -1)).value

    def pivotal_count(self, bits: np.ndarray) -> int:
        """Number of pivotal bits at ``bits``; generic flip-and-reevaluate."""
        bits = np.asarray(bits, dtype=bool)
        base = self.evaluate(bits)
        count = 0
        for i in range(self.n):
            flipped = bits.copy()
            flipped[i] = not flipped[i]
            if self.evaluate(flipped) != base:
                count += 1
        return count

    def symmetry_classes(self) -> Optional[np.ndarray]:
        """Orbit label per bit under the family's symmetry group, or None."""
        return None


def flip_time(f: MonotoneFunction, labels: LabelAssignment) -> FlipTime:
    """Smallest density at which f becomes 1 along the coupling.

    Uses sorted insertion through the incremental contract when available
    (ties broken by bit index via the stable sort), otherwise binary search
    over the sorted labels with O(log n) full evaluations.  Raises
    NoFlipError for constant-zero functions.
    """
    if f.n != labels.n:
        raise ValueError("function and labels disagree on bit count")
    arr = labels.labels
    state = f.incremental_state()
    if state is not None:
        if state.output == 1:
            return FlipTime(0.0, None)
        order = np.argsort(arr, kind="stable")
        for j in order:
            j = int(j)
            if state.insert(j) == 1:
                return FlipTime(float(arr[j]), j)
        raise NoFlipError("function is constant zero on this label set")
    # fallback: binary search over the sorted order, valid by monotonicity
    if f.evaluate(np.zeros(f.n, dtype=bool)) == 1:
        return FlipTime(0.0, None)
    if f.evaluate(np.ones(f.n, dtype=bool)) == 0:
        raise NoFlipError("function is constant zero")
    order = np.argsort(arr, kind="stable")
    s = arr[order]
    lo, hi = 0, f.n - 1
    while lo < hi:
        mid = (lo + hi) // 2
        if f.evaluate(arr <= s[mid]) == 1:
            hi = mid
        else:
            lo = mid + 1
    return FlipTime(float(s[lo]), int(order[lo]))


def flip_time_via_witnesses(witnesses: Sequence[Sequence[int]],
                            labels: LabelAssignment) -> FlipTime:
    """Witness oracle: min over 1-witnesses of the max label inside.

    Agrees exactly with `flip_time` on the function the witnesses induce.
    """
    wl = list(witnesses)
    if not wl:
        raise NoFlipError("empty witness list: function is constant zero")
    arr = labels.labels
    best = np.inf
    best_bit = None
    for w in wl:
        idx = np.asarray(w, dtype=np.int64)
        if idx.size == 0:
            return FlipTime(0.0, None)   # empty witness: constant one
        if idx.max() >= labels.n or idx.min() < 0:
            raise ValueError("witness index out of range")
        k = idx[int(np.argmax(arr[idx]))]
        v = float(arr[k])
        if v < best:
            best = v
            best_bit = int(k)
    return FlipTime(best, best_bit)


class ReversedFunction(MonotoneFunction):
    """Reversal: flips all input bits and the output; monotone again.

    Flip times satisfy T(reversed f)(labels) = 1 - T(f)(1 - labels) exactly,
    which is the fast path used for sampling.
    """

    family = "reversed"

    def __init__(self, base: MonotoneFunction):
        super().__init__(base.n)
        self.base = base

    def evaluate(self, bits: np.ndarray) -> int:
        return 1 - self.base.evaluate(~np.asarray(bits, dtype=bool))

    def one_witnesses(self):
        return self.base.zero_witnesses()

    def zero_witnesses(self):
        return self.base.one_witnesses()

    def flip_time_from_labels(self, labels: np.ndarray) -> float:
        return 1.0 - self.base.flip_time_from_labels(1.0 - np.asarray(labels, float))

    def symmetry_classes(self):
        return self.base.symmetry_classes()


def reverse(f: MonotoneFunction) -> MonotoneFunction:
    """The reversal of f (an involution up to pointwise equality)."""
    if isinstance(f, ReversedFunction):
        return f.base
    return ReversedFunction(f)
