"""The function zoo: constructors and closed-form limit laws.

Every family implements the `MonotoneFunction` protocol with incremental
insertion support, and most override `flip_time_from_labels` with an exact
shortcut (order statistics, witness reductions, tree folding, or a compiled
kernel).  `limit_law` returns the family's limiting flip-time distribution
together with its normalization sequence.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np
from numpy.lib.stride_tricks import sliding_window_view

from . import kernels
from .coupling import MonotoneFunction
from .errors import NoFlipError, UnsupportedLimitError
from .normal import norm_cdf

FAMILIES = ("majority", "tribes", "circular-tribes", "iterated-majority",
            "triangle", "connectivity", "clique", "dictator", "or",
            "and-majority-dictator")


@dataclass(frozen=True)
class FamilySpec:
    """Parameters identifying one member of one family."""

    family: str
    n: Optional[int] = None          # bit count (bit-indexed families)
    p_bias: float = 0.5              # biased majority threshold
    m: int = 3                       # iterated-majority arity
    height: int = 1                  # iterated-majority tree height
    vertices: Optional[int] = None   # graph families
    p: float = 0.5                   # clique edge density

    def __post_init__(self):
        if self.family not in FAMILIES:
            raise ValueError(f"unknown family {self.family!r}")
        if self.family == "iterated-majority" and self.n is not None \
                and self.n != self.m ** self.height:
            raise ValueError("bit count must equal arity ** height")
        if self.family in ("triangle", "connectivity", "clique") \
                and self.n is not None and self.vertices is not None \
                and self.n != self.vertices * (self.vertices - 1) // 2:
            raise ValueError("bit count must equal the number of vertex pairs")

    @property
    def bit_count(self) -> int:
        if self.family == "iterated-majority":
            return self.m ** self.height
        if self.family in ("triangle", "connectivity", "clique"):
            v = self.vertices
            if v is None:
                raise ValueError("graph families need a vertex count")
            return v * (v - 1) // 2
        if self.n is None:
            raise ValueError(f"family {self.family!r} needs a bit count")
        return self.n


@dataclass(frozen=True)
class AnalyticLimit:
    """A claimed limit law F with its normalization sequence.

    ``normalization(size)`` returns the pair (a, b) rescaling the flip time as
    a*(T - b); ``size`` is the bit count, except for graph families where it
    is the vertex count.
    """

    name: str
    cdf: Callable[[np.ndarray], np.ndarray]
    normalization: Callable[[int], tuple]
    density: Optional[Callable[[np.ndarray], np.ndarray]] = None


def tribes_length(n: int) -> int:
    """Tribe size floor(log2 n - log2 log2 n)."""
    if n < 4:
        raise ValueError("tribes needs at least 4 bits")
    ell = int(math.floor(math.log2(n) - math.log2(math.log2(n))))
    if ell < 1:
        raise ValueError("tribe length must be >= 1")
    return ell


def tribes_alpha(n: int) -> float:
    """Correction exponent (log2 n - log2 log2 n) / tribe length."""
    return (math.log2(n) - math.log2(math.log2(n))) / tribes_length(n)


def clique_size(v: int, p: float) -> int:
    """Largest ell whose expected ell-clique count C(v,ell) p^C(ell,2) is >= 1."""
    if v < 3:
        raise ValueError("need at least 3 vertices")
    if not 0.0 < p < 1.0:
        raise ValueError("edge density must lie in (0, 1)")
    logp = math.log(p)
    best = 1
    for ell in range(2, v + 1):
        log_expect = (math.lgamma(v + 1) - math.lgamma(ell + 1)
                      - math.lgamma(v - ell + 1)
                      + ell * (ell - 1) / 2 * logp)
        if log_expect >= 0.0:
            best = ell
    return best


def edge_index_table(v: int):
    """Endpoints (u, w), u < w, of edge k in lexicographic pair order."""
    eu, ew = np.triu_indices(v, k=1)
    return eu.astype(np.int32), ew.astype(np.int32)


# ---------------------------------------------------------------------------
# bit-indexed families


class MajorityFunction(MonotoneFunction):
    """Output 1 iff at least ceil(p_bias * n) bits are 1."""

    family = "majority"

    def __init__(self, n: int, p_bias: float = 0.5):
        super().__init__(n)
        if not 0.0 < p_bias < 1.0:
            raise ValueError("bias must lie in (0, 1)")
        self.p_bias = p_bias
        self.threshold = math.ceil(p_bias * n)

    def evaluate(self, bits):
        return int(int(np.count_nonzero(bits)) >= self.threshold)

    def incremental_state(self):
        return _CounterState(self.threshold)

    def flip_time_from_labels(self, labels):
        k = self.threshold
        if k <= 0:
            return 0.0
        if k > self.n:
            raise NoFlipError("threshold above bit count")
        return float(np.partition(labels, k - 1)[k - 1])

    def pivotal_count(self, bits):
        c = int(np.count_nonzero(bits))
        if c == self.threshold - 1:
            return self.n - c
        if c == self.threshold:
            return c
        return 0

    def symmetry_classes(self):
        return np.zeros(self.n, dtype=np.int64)


class _CounterState:
    __slots__ = ("count", "threshold", "output")

    def __init__(self, threshold):
        self.count = 0
        self.threshold = threshold
        self.output = int(threshold <= 0)

    def insert(self, i):
        self.count += 1
        if self.count >= self.threshold:
            self.output = 1
        return self.output


class DictatorFunction(MonotoneFunction):
    """Output equals the first bit."""

    family = "dictator"

    def evaluate(self, bits):
        return int(bool(bits[0]))

    def incremental_state(self):
        return _DictatorState()

    def one_witnesses(self):
        return [np.array([0], dtype=np.int64)]

    def zero_witnesses(self):
        return [np.array([0], dtype=np.int64)]

    def flip_time_from_labels(self, labels):
        return float(labels[0])

    def pivotal_count(self, bits):
        return 1

    def pivotal_class_split(self, bits):
        return np.array([1.0, 0.0]) if self.n > 1 else np.array([1.0])

    def symmetry_classes(self):
        cls = np.ones(self.n, dtype=np.int64)
        cls[0] = 0
        return cls


class _DictatorState:
    __slots__ = ("output",)

    def __init__(self):
        self.output = 0

    def insert(self, i):
        if i == 0:
            self.output = 1
        return self.output


class OrFunction(MonotoneFunction):
    """Output 1 iff any bit is 1."""

    family = "or"

    def evaluate(self, bits):
        return int(bool(np.any(bits)))

    def incremental_state(self):
        return _CounterState(1)

    def one_witnesses(self):
        return [np.array([i], dtype=np.int64) for i in range(self.n)]

    def zero_witnesses(self):
        return [np.arange(self.n, dtype=np.int64)]

    def flip_time_from_labels(self, labels):
        return float(np.min(labels))

    def pivotal_count(self, bits):
        c = int(np.count_nonzero(bits))
        if c == 0:
            return self.n
        if c == 1:
            return 1
        return 0

    def symmetry_classes(self):
        return np.zeros(self.n, dtype=np.int64)


class AndFunction(MonotoneFunction):
    """Output 1 iff every bit is 1."""

    family = "and"

    def evaluate(self, bits):
        return int(bool(np.all(bits)))

    def incremental_state(self):
        return _CounterState(self.n)

    def one_witnesses(self):
        return [np.arange(self.n, dtype=np.int64)]

    def zero_witnesses(self):
        return [np.array([i], dtype=np.int64) for i in range(self.n)]

    def flip_time_from_labels(self, labels):
        return float(np.max(labels))

    def pivotal_count(self, bits):
        c = int(np.count_nonzero(bits))
        if c == self.n:
            return self.n
        if c == self.n - 1:
            return 1
        return 0

    def symmetry_classes(self):
        return np.zeros(self.n, dtype=np.int64)


class AndMajorityDictatorFunction(MonotoneFunction):
    """AND of majority on all n bits and the first-bit dictator."""

    family = "and-majority-dictator"

    def __init__(self, n: int, p_bias: float = 0.5):
        super().__init__(n)
        self.threshold = math.ceil(p_bias * n)

    def evaluate(self, bits):
        return int(bool(bits[0]) and int(np.count_nonzero(bits)) >= self.threshold)

    def incremental_state(self):
        return _AndMajDictState(self.threshold)

    def flip_time_from_labels(self, labels):
        k = self.threshold
        maj = float(np.partition(labels, k - 1)[k - 1]) if k >= 1 else 0.0
        return max(float(labels[0]), maj)

    def pivotal_count(self, bits):
        c = int(np.count_nonzero(bits))
        d = bool(bits[0])
        k = self.threshold
        if d and c >= k:                       # output is 1
            return 1 + (c - 1 if c == k else 0)
        if d:                                  # output 0 because count short
            return self.n - c if c == k - 1 else 0
        return 1 if c >= k - 1 else 0          # only the dictator bit can help

    def pivotal_class_split(self, bits):
        c = int(np.count_nonzero(bits))
        d = bool(bits[0])
        k = self.threshold
        if d and c >= k:
            return np.array([1.0, float(c - 1 if c == k else 0)])
        if d:
            return np.array([0.0, float(self.n - c if c == k - 1 else 0)])
        return np.array([1.0 if c >= k - 1 else 0.0, 0.0])

    def symmetry_classes(self):
        cls = np.ones(self.n, dtype=np.int64)
        cls[0] = 0
        return cls


class _AndMajDictState:
    __slots__ = ("count", "threshold", "has_first", "output")

    def __init__(self, threshold):
        self.count = 0
        self.threshold = threshold
        self.has_first = False
        self.output = 0

    def insert(self, i):
        self.count += 1
        if i == 0:
            self.has_first = True
        if self.has_first and self.count >= self.threshold:
            self.output = 1
        return self.output


class TribesFunction(MonotoneFunction):
    """OR of ANDs over disjoint blocks of length floor(log2 n - log2 log2 n).

    Bits past the last full tribe are residual and never matter.
    """

    family = "tribes"

    def __init__(self, n: int):
        super().__init__(n)
        self.ell = tribes_length(n)
        self.num_tribes = n // self.ell
        self.covered = self.num_tribes * self.ell
        self.alpha = tribes_alpha(n)

    def evaluate(self, bits):
        blocks = np.asarray(bits[:self.covered]).reshape(self.num_tribes, self.ell)
        return int(bool(blocks.all(axis=1).any()))

    def incremental_state(self):
        return _TribesState(self.ell, self.num_tribes)

    def one_witnesses(self):
        return [np.arange(t * self.ell, (t + 1) * self.ell, dtype=np.int64)
                for t in range(self.num_tribes)]

    def flip_time_from_labels(self, labels):
        blocks = np.asarray(labels[:self.covered]).reshape(self.num_tribes, self.ell)
        return float(blocks.max(axis=1).min())

    def pivotal_count(self, bits):
        blocks = np.asarray(bits[:self.covered]).reshape(self.num_tribes, self.ell)
        counts = blocks.sum(axis=1)
        complete = int(np.count_nonzero(counts == self.ell))
        if complete >= 1:
            return self.ell if complete == 1 else 0
        return int(np.count_nonzero(counts == self.ell - 1))

    def pivotal_class_split(self, bits):
        count = float(self.pivotal_count(bits))
        if self.covered < self.n:
            return np.array([count, 0.0])
        return np.array([count])

    def symmetry_classes(self):
        cls = np.ones(self.n, dtype=np.int64)
        cls[:self.covered] = 0
        return cls


class _TribesState:
    __slots__ = ("ell", "num_tribes", "counts", "output")

    def __init__(self, ell, num_tribes):
        self.ell = ell
        self.num_tribes = num_tribes
        self.counts = [0] * num_tribes
        self.output = 0

    def insert(self, i):
        t = i // self.ell
        if t < self.num_tribes:
            self.counts[t] += 1
            if self.counts[t] == self.ell:
                self.output = 1
        return self.output


class CircularTribesFunction(MonotoneFunction):
    """Output 1 iff some circular interval of floor(log2 n) bits is all ones."""

    family = "circular-tribes"

    def __init__(self, n: int):
        super().__init__(n)
        if n < 2:
            raise ValueError("need at least 2 bits")
        self.run_length = int(math.floor(math.log2(n)))
        if self.run_length < 1:
            raise ValueError("interval length must be >= 1")

    def evaluate(self, bits):
        bits = np.asarray(bits, dtype=bool)
        if bits.all():
            return 1
        ext = np.concatenate([bits, bits[:self.run_length - 1]]) if self.run_length > 1 else bits
        window = sliding_window_view(ext, self.run_length)[:self.n]
        return int(bool(window.all(axis=1).any()))

    def incremental_state(self):
        return _RunMergeState(self.n, self.run_length)

    def one_witnesses(self):
        return [np.arange(s, s + self.run_length, dtype=np.int64) % self.n
                for s in range(self.n)]

    def flip_time_from_labels(self, labels):
        arr = np.asarray(labels, dtype=float)
        ext = np.concatenate([arr, arr[:self.run_length - 1]]) if self.run_length > 1 else arr
        window = sliding_window_view(ext, self.run_length)[:self.n]
        return float(window.max(axis=1).min())

    def pivotal_count(self, bits):
        bits = np.asarray(bits, dtype=bool)
        L = self.run_length
        n = self.n
        if bits.all():
            # removing any bit leaves a run of n-1
            return 0 if n - 1 >= L else n
        lengths, endpoint_len = _circular_runs(bits)
        long_runs = [r for r in lengths if r >= L]
        if long_runs:
            if len(long_runs) > 1:
                return 0
            run = long_runs[0]
            lo, hi = max(0, run - L), min(L - 1, run - 1)
            return hi - lo + 1 if hi >= lo else 0
        # output 0: a zero-bit is pivotal iff joining its neighbor runs reaches L
        count = 0
        for i in np.nonzero(~bits)[0]:
            left = endpoint_len.get((int(i) - 1) % n, 0)
            right = endpoint_len.get((int(i) + 1) % n, 0)
            if left + 1 + right >= L:
                count += 1
        return count

    def symmetry_classes(self):
        return np.zeros(self.n, dtype=np.int64)


def _circular_runs(bits):
    """Maximal circular runs of ones (not all-ones): returns the list of run
    lengths and a map from run endpoints to their run's length."""
    n = len(bits)
    lengths = []
    endpoint_len = {}
    for start in range(n):
        if not bits[start]:
            continue
        if bits[(start - 1) % n]:
            continue   # not the left end of a run
        length = 1
        i = start
        while bits[(i + 1) % n]:
            length += 1
            i = (i + 1) % n
        lengths.append(length)
        endpoint_len[start] = length
        endpoint_len[i] = length
    return lengths, endpoint_len


class _RunMergeState:
    """Tracks maximal runs of ones on the circle; run lengths are stored at
    each run's two endpoints and unset positions stay 0, so a merge on insert
    reads both neighbors and rewrites the merged run's endpoints."""

    __slots__ = ("n", "L", "length_at", "output")

    def __init__(self, n, L):
        self.n = n
        self.L = L
        self.length_at = [0] * n
        self.output = 0

    def insert(self, i):
        n = self.n
        left = self.length_at[(i - 1) % n]
        right = self.length_at[(i + 1) % n]
        total = min(left + 1 + right, n)
        self.length_at[(i - left) % n] = total
        self.length_at[(i + right) % n] = total
        if total >= self.L:
            self.output = 1
        return self.output


class IteratedMajorityFunction(MonotoneFunction):
    """Recursive majority on an m-ary tree: n = m**height bits at the leaves."""

    family = "iterated-majority"

    def __init__(self, m: int, height: int):
        if m < 3 or m % 2 == 0:
            raise ValueError("arity must be an odd integer >= 3")
        if height < 1:
            raise ValueError("height must be >= 1")
        super().__init__(m ** height)
        self.m = m
        self.height = height
        self.quorum = (m + 1) // 2

    def evaluate(self, bits):
        level = np.asarray(bits, dtype=np.int64)
        for _ in range(self.height):
            level = (level.reshape(-1, self.m).sum(axis=1) >= self.quorum).astype(np.int64)
        return int(level[0])

    def incremental_state(self):
        return _TreeCounterState(self.m, self.height)

    def flip_time_from_labels(self, labels):
        work = np.array(labels, dtype=np.float64, copy=True)
        return float(kernels.itermaj_flip_time(work, self.m, self.height))

    def pivotal_count(self, bits):
        m, q = self.m, self.quorum
        counts = []
        level = np.asarray(bits, dtype=np.int64)
        for _ in range(self.height):
            grouped = level.reshape(-1, m)
            c = grouped.sum(axis=1)
            counts.append((c, grouped))
            level = (c >= q).astype(np.int64)
        crit = np.array([True])
        for c, grouped in reversed(counts):
            # child edge is critical iff the siblings' ones total q - 1
            child_crit = (c[:, None] - grouped) == (q - 1)
            crit = child_crit & crit[:, None]
            crit = crit.reshape(-1)
        return int(np.count_nonzero(crit))

    def symmetry_classes(self):
        return np.zeros(self.n, dtype=np.int64)


class _TreeCounterState:
    """Per-node ones counters; a flip propagates up in O(height)."""

    __slots__ = ("m", "height", "quorum", "counts", "offsets", "output")

    def __init__(self, m, height):
        self.m = m
        self.height = height
        self.quorum = (m + 1) // 2
        self.offsets = [(m ** lev - 1) // (m - 1) for lev in range(height)]
        self.counts = [0] * ((m ** height - 1) // (m - 1))
        self.output = 0

    def insert(self, i):
        pos = i
        for lev in range(self.height - 1, -1, -1):
            pos //= self.m
            node = self.offsets[lev] + pos
            self.counts[node] += 1
            if self.counts[node] != self.quorum:
                break
            if lev == 0:
                self.output = 1
        return self.output


# ---------------------------------------------------------------------------
# graph-property families (bits are edges in lexicographic pair order)


class GraphFunction(MonotoneFunction):
    def __init__(self, vertices: int):
        if vertices < 3:
            raise ValueError("need at least 3 vertices")
        super().__init__(vertices * (vertices - 1) // 2)
        self.vertices = vertices
        self.edge_u, self.edge_w = edge_index_table(vertices)

    def adjacency(self, bits):
        v = self.vertices
        a = np.zeros((v, v), dtype=bool)
        on = np.asarray(bits, dtype=bool)
        a[self.edge_u[on], self.edge_w[on]] = True
        a |= a.T
        return a

    def symmetry_classes(self):
        return np.zeros(self.n, dtype=np.int64)

    def _sorted_edges(self, labels, cutoff):
        labels = np.asarray(labels, dtype=np.float64)
        if cutoff >= 1.0:
            order = np.argsort(labels, kind="stable")
            return (self.edge_u[order], self.edge_w[order], labels[order])
        keep = np.nonzero(labels <= cutoff)[0]
        order = keep[np.argsort(labels[keep], kind="stable")]
        return (self.edge_u[order], self.edge_w[order], labels[order])


class TriangleFunction(GraphFunction):
    """Output 1 iff the edge set contains a triangle."""

    family = "triangle"

    def evaluate(self, bits):
        a = self.adjacency(bits)
        paths = a.astype(np.uint16) @ a.astype(np.uint16)
        return int(bool(np.any(a & (paths > 0))))

    def incremental_state(self):
        return _TriangleState(self.vertices, self.edge_u, self.edge_w)

    def flip_time_from_labels(self, labels):
        # the first triangle appears at p = O(1/v): sort only small labels
        cutoff = min(1.0, 14.0 / self.vertices)
        eu, ew, elab = self._sorted_edges(labels, cutoff)
        t = kernels.triangle_flip_time(eu, ew, elab, self.vertices)
        if math.isnan(t) and cutoff < 1.0:
            eu, ew, elab = self._sorted_edges(labels, 1.0)
            t = kernels.triangle_flip_time(eu, ew, elab, self.vertices)
        if math.isnan(t):
            raise NoFlipError("graph has no triangle even at full density")
        return t

    def pivotal_count(self, bits):
        a = self.adjacency(bits)
        common = (a.astype(np.int64) @ a.astype(np.int64))
        open_tri = common[self.edge_u, self.edge_w] * np.asarray(bits, dtype=np.int64)
        total = int(open_tri.sum()) // 3
        if total >= 1:
            per_edge = common[self.edge_u, self.edge_w]
            return int(np.count_nonzero(np.asarray(bits, bool) & (per_edge == total)))
        per_edge = common[self.edge_u, self.edge_w]
        return int(np.count_nonzero(~np.asarray(bits, bool) & (per_edge >= 1)))


class _TriangleState:
    __slots__ = ("adj", "eu", "ew", "output")

    def __init__(self, v, eu, ew):
        self.adj = [0] * v
        self.eu = eu
        self.ew = ew
        self.output = 0

    def insert(self, i):
        if not self.output:
            u, w = int(self.eu[i]), int(self.ew[i])
            if self.adj[u] & self.adj[w]:
                self.output = 1
            self.adj[u] |= 1 << w
            self.adj[w] |= 1 << u
        return self.output


class ConnectivityFunction(GraphFunction):
    """Output 1 iff the edge set connects all vertices."""

    family = "connectivity"

    def evaluate(self, bits):
        v = self.vertices
        parent = list(range(v))

        def find(x):
            while parent[x] != x:
                parent[x] = parent[parent[x]]
                x = parent[x]
            return x

        ncomp = v
        for k in np.nonzero(np.asarray(bits, dtype=bool))[0]:
            a, b = find(int(self.edge_u[k])), find(int(self.edge_w[k]))
            if a != b:
                parent[a] = b
                ncomp -= 1
        return int(ncomp == 1)

    def incremental_state(self):
        return _ConnectivityState(self.vertices, self.edge_u, self.edge_w)

    def flip_time_from_labels(self, labels):
        cutoff = min(1.0, (math.log(self.vertices) + 30.0) / self.vertices)
        eu, ew, elab = self._sorted_edges(labels, cutoff)
        t = kernels.connectivity_flip_time(eu, ew, elab, self.vertices)
        if math.isnan(t) and cutoff < 1.0:
            eu, ew, elab = self._sorted_edges(labels, 1.0)
            t = kernels.connectivity_flip_time(eu, ew, elab, self.vertices)
        if math.isnan(t):
            raise NoFlipError("graph never connects")
        return t

    def pivotal_count(self, bits):
        comp = self._components(bits)
        ncomp = comp.max() + 1
        if ncomp >= 3:
            return 0
        if ncomp == 2:
            sizes = np.bincount(comp)
            return int(sizes[0]) * int(sizes[1])
        return _count_bridges(self.vertices, self.edge_u, self.edge_w,
                              np.asarray(bits, dtype=bool))

    def _components(self, bits):
        v = self.vertices
        parent = list(range(v))

        def find(x):
            while parent[x] != x:
                parent[x] = parent[parent[x]]
                x = parent[x]
            return x

        for k in np.nonzero(np.asarray(bits, dtype=bool))[0]:
            a, b = find(int(self.edge_u[k])), find(int(self.edge_w[k]))
            if a != b:
                parent[a] = b
        roots = {find(i) for i in range(v)}
        remap = {r: j for j, r in enumerate(sorted(roots))}
        return np.array([remap[find(i)] for i in range(v)], dtype=np.int64)


class _ConnectivityState:
    __slots__ = ("parent", "ncomp", "eu", "ew", "output")

    def __init__(self, v, eu, ew):
        self.parent = list(range(v))
        self.ncomp = v
        self.eu = eu
        self.ew = ew
        self.output = int(v == 1)

    def _find(self, x):
        p = self.parent
        while p[x] != x:
            p[x] = p[p[x]]
            x = p[x]
        return x

    def insert(self, i):
        a, b = self._find(int(self.eu[i])), self._find(int(self.ew[i]))
        if a != b:
            self.parent[a] = b
            self.ncomp -= 1
            if self.ncomp == 1:
                self.output = 1
        return self.output


def _count_bridges(v, eu, ew, bits):
    """Number of bridges of the (connected) graph, iterative DFS lowlink."""
    adj = [[] for _ in range(v)]
    for k in np.nonzero(bits)[0]:
        u, w = int(eu[k]), int(ew[k])
        adj[u].append((w, int(k)))
        adj[w].append((u, int(k)))
    disc = [-1] * v
    low = [0] * v
    bridges = 0
    timer = 0
    for root in range(v):
        if disc[root] != -1:
            continue
        stack = [(root, -1, iter(adj[root]))]
        disc[root] = low[root] = timer
        timer += 1
        while stack:
            node, via, it = stack[-1]
            advanced = False
            for (nxt, ek) in it:
                if ek == via:
                    continue
                if disc[nxt] == -1:
                    disc[nxt] = low[nxt] = timer
                    timer += 1
                    stack.append((nxt, ek, iter(adj[nxt])))
                    advanced = True
                    break
                low[node] = min(low[node], disc[nxt])
            if not advanced:
                stack.pop()
                if stack:
                    pnode = stack[-1][0]
                    low[pnode] = min(low[pnode], low[node])
                    if low[node] > disc[pnode]:
                        bridges += 1
    return bridges


class CliqueFunction(GraphFunction):
    """Output 1 iff the graph contains a clique of the first-moment size."""

    family = "clique"

    def __init__(self, vertices: int, p: float = 0.5):
        super().__init__(vertices)
        self.p = p
        self.clique_order = clique_size(vertices, p)

    def evaluate(self, bits):
        if self.clique_order <= 1:
            return 1
        adj = [0] * self.vertices
        on = np.nonzero(np.asarray(bits, dtype=bool))[0]
        for k in on:
            u, w = int(self.edge_u[k]), int(self.edge_w[k])
            adj[u] |= 1 << w
            adj[w] |= 1 << u
        full = (1 << self.vertices) - 1
        return int(_has_clique(adj, full, self.clique_order))

    def incremental_state(self):
        return _CliqueState(self.vertices, self.edge_u, self.edge_w, self.clique_order)


def _has_clique(adj, candidates, size):
    """Recursive bitset search for a clique of the given size."""
    if size == 0:
        return True
    if candidates.bit_count() < size:
        return False
    while candidates:
        v = (candidates & -candidates).bit_length() - 1
        candidates &= candidates - 1
        if _has_clique(adj, candidates & adj[v], size - 1):
            return True
        if candidates.bit_count() < size:
            return False
    return False


class _CliqueState:
    __slots__ = ("adj", "eu", "ew", "size", "output")

    def __init__(self, v, eu, ew, size):
        self.adj = [0] * v
        self.eu = eu
        self.ew = ew
        self.size = size
        self.output = int(size <= 1)

    def insert(self, i):
        u, w = int(self.eu[i]), int(self.ew[i])
        self.adj[u] |= 1 << w
        self.adj[w] |= 1 << u
        if not self.output:
            common = self.adj[u] & self.adj[w]
            if _has_clique(self.adj, common, self.size - 2):
                self.output = 1
        return self.output


# ---------------------------------------------------------------------------
# construction and limit laws


def make_family(spec: FamilySpec) -> MonotoneFunction:
    """Instantiate the monotone function described by ``spec``."""
    fam = spec.family
    if fam == "majority":
        return MajorityFunction(spec.bit_count, spec.p_bias)
    if fam == "tribes":
        return TribesFunction(spec.bit_count)
    if fam == "circular-tribes":
        return CircularTribesFunction(spec.bit_count)
    if fam == "iterated-majority":
        return IteratedMajorityFunction(spec.m, spec.height)
    if fam == "triangle":
        return TriangleFunction(spec.vertices)
    if fam == "connectivity":
        return ConnectivityFunction(spec.vertices)
    if fam == "clique":
        return CliqueFunction(spec.vertices, spec.p)
    if fam == "dictator":
        return DictatorFunction(spec.bit_count)
    if fam == "or":
        return OrFunction(spec.bit_count)
    if fam == "and-majority-dictator":
        return AndMajorityDictatorFunction(spec.bit_count, spec.p_bias)
    raise ValueError(f"unknown family {fam!r}")


def limit_law(spec: FamilySpec, p_n: Optional[float] = None,
              lam: Optional[float] = None) -> AnalyticLimit:
    """Closed-form limit law of the rescaled flip time for ``spec``.

    The clique family has a limit only along admissible density sequences;
    supply the pair (p_n, lam) for it, otherwise UnsupportedLimitError is
    raised.  Circular tribes has no quantitative law here.
    """
    fam = spec.family
    if fam == "majority":
        p = spec.p_bias
        return AnalyticLimit(
            name="standard normal",
            cdf=lambda x: norm_cdf(x),
            density=lambda x: np.exp(-0.5 * np.asarray(x, float) ** 2) / math.sqrt(2 * math.pi),
            normalization=lambda n: (math.sqrt(n / (p * (1.0 - p))), p),
        )
    if fam == "tribes":
        return AnalyticLimit(
            name="reverse Gumbel",
            cdf=lambda x: 1.0 - np.exp(-np.exp(np.asarray(x, float))),
            density=lambda x: np.exp(np.asarray(x, float)) * np.exp(-np.exp(np.asarray(x, float))),
            normalization=lambda n: (2.0 * math.log2(n), 0.5 ** tribes_alpha(n)),
        )
    if fam == "triangle":
        def tri_cdf(x):
            x = np.asarray(x, dtype=float)
            return np.where(x > 0, 1.0 - np.exp(-np.clip(x, 0, None) ** 3 / 6.0), 0.0)
        return AnalyticLimit(
            name="first-triangle law",
            cdf=tri_cdf,
            normalization=lambda v: (float(v), 0.0),
        )
    if fam == "connectivity":
        return AnalyticLimit(
            name="Gumbel",
            cdf=lambda x: np.exp(-np.exp(-np.asarray(x, float))),
            density=lambda x: np.exp(-np.asarray(x, float)) * np.exp(-np.exp(-np.asarray(x, float))),
            normalization=lambda v: (float(v), math.log(v) / v),
        )
    if fam == "iterated-majority":
        from . import itermaj
        params = itermaj.IterMajParams(m=spec.m)
        rate = itermaj.growth_rate(spec.m)

        def im_cdf(x):
            return itermaj.limit_cdf(params, x)

        def im_density(x):
            xs = np.atleast_1d(np.asarray(x, dtype=float))
            out = np.array([itermaj.limit_density(params, float(t)) for t in xs])
            return out if np.ndim(x) else float(out[0])

        def im_norm(n):
            height = round(math.log(n) / math.log(spec.m))
            return (rate ** height, 0.5)

        return AnalyticLimit(name=f"iterated-majority limit (m={spec.m})",
                             cdf=im_cdf, density=im_density, normalization=im_norm)
    if fam == "dictator":
        return AnalyticLimit(
            name="uniform on [0,1]",
            cdf=lambda x: np.clip(np.asarray(x, float), 0.0, 1.0),
            density=lambda x: ((np.asarray(x, float) >= 0) & (np.asarray(x, float) <= 1)).astype(float),
            normalization=lambda n: (1.0, 0.0),
        )
    if fam == "or":
        def or_cdf(x):
            x = np.asarray(x, dtype=float)
            return np.where(x > 0, 1.0 - np.exp(-np.clip(x, 0, None)), 0.0)
        return AnalyticLimit(
            name="unit exponential",
            cdf=or_cdf,
            normalization=lambda n: (float(n), 0.0),
        )
    if fam == "and-majority-dictator":
        def amd_cdf(x):
            x = np.asarray(x, dtype=float)
            return np.clip(np.where(x >= 0.5, x, 0.0), 0.0, 1.0)
        return AnalyticLimit(
            name="max(uniform, 1/2)",
            cdf=amd_cdf,
            normalization=lambda n: (1.0, 0.0),
        )
    if fam == "clique":
        if p_n is None or lam is None:
            raise UnsupportedLimitError(
                "clique limits require an admissible density sequence: "
                "pass p_n and lam")
        ell = clique_size(spec.vertices, spec.p)
        return AnalyticLimit(
            name=f"clique compound law (lambda={lam})",
            cdf=lambda x: 1.0 - np.exp(-lam * np.exp(np.asarray(x, float))),
            normalization=lambda v: (ell * ell / (2.0 * p_n), p_n),
        )
    raise UnsupportedLimitError(f"family {fam!r} has no quantitative limit law here")
