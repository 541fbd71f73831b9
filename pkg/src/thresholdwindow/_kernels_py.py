"""Pure NumPy/Python mirror of the compiled kernels in `_ckernels`.

Same names, same signatures, same results; used when the extension is not
built and as the reference side of the backend-equality tests.  These paths
favor clarity over speed.
"""

from __future__ import annotations

import math

import numpy as np
from scipy import ndimage

# triangular-lattice adjacency in axial coordinates
NEIGHBOR_OFFSETS = ((-1, 0), (1, 0), (0, -1), (0, 1), (1, -1), (-1, 1))

# scipy.ndimage structuring element for the same adjacency
_TRI_STRUCTURE = np.array([[0, 1, 1],
                           [1, 1, 1],
                           [1, 1, 0]], dtype=bool)


class _UnionFind:
    """Array union-find with path halving and union by size."""

    __slots__ = ("parent", "size")

    def __init__(self, n):
        self.parent = list(range(n))
        self.size = [1] * n

    def find(self, x):
        p = self.parent
        while p[x] != x:
            p[x] = p[p[x]]
            x = p[x]
        return x

    def union(self, a, b):
        a, b = self.find(a), self.find(b)
        if a == b:
            return False
        if self.size[a] < self.size[b]:
            a, b = b, a
        self.parent[b] = a
        self.size[a] += self.size[b]
        return True


def percolation_flip_time(labels, order, n):
    """See `_ckernels.percolation_flip_time`."""
    nsites = n * n
    left, right = nsites, nsites + 1
    uf = _UnionFind(nsites + 2)
    is_open = bytearray(nsites)
    unions = 0
    t, pivot = math.nan, -1
    crossed = False
    for j in order:
        j = int(j)
        r, c = divmod(j, n)
        is_open[j] = 1
        if c == 0:
            unions += 1
            uf.union(j, left)
        if c == n - 1:
            unions += 1
            uf.union(j, right)
        for dr, dc in NEIGHBOR_OFFSETS:
            nr, nc = r + dr, c + dc
            if 0 <= nr < n and 0 <= nc < n and is_open[nr * n + nc]:
                unions += 1
                uf.union(j, nr * n + nc)
        if not crossed and uf.find(left) == uf.find(right):
            crossed = True
            t = float(labels[j])
            pivot = j
    if not crossed:
        return (math.nan, -1, nsites, unions)
    return (t, pivot, nsites, unions)


def _label_clusters(is_open, n):
    grid = np.asarray(is_open, dtype=bool).reshape(n, n)
    lab, _ = ndimage.label(grid, structure=_TRI_STRUCTURE)
    return lab


def crossing_exists(is_open, n):
    """See `_ckernels.crossing_exists`."""
    lab = _label_clusters(is_open, n)
    left = set(lab[:, 0][lab[:, 0] > 0].tolist())
    if not left:
        return False
    right = set(lab[:, -1][lab[:, -1] > 0].tolist())
    return bool(left & right)


def bridging_pivotal_count(is_open, n):
    """See `_ckernels.bridging_pivotal_count`."""
    lab = _label_clusters(is_open, n)
    left_ids = np.unique(lab[:, 0][lab[:, 0] > 0])
    right_ids = np.unique(lab[:, -1][lab[:, -1] > 0])
    if np.intersect1d(left_ids, right_ids).size:
        return -1
    reach_l = np.isin(lab, left_ids)
    reach_r = np.isin(lab, right_ids)
    touch_l = np.zeros((n, n), dtype=bool)
    touch_r = np.zeros((n, n), dtype=bool)
    touch_l[:, 0] = True
    touch_r[:, -1] = True
    for dr, dc in NEIGHBOR_OFFSETS:
        src_r = slice(max(0, dr), n + min(0, dr))
        dst_r = slice(max(0, -dr), n + min(0, -dr))
        src_c = slice(max(0, dc), n + min(0, dc))
        dst_c = slice(max(0, -dc), n + min(0, -dc))
        touch_l[dst_r, dst_c] |= reach_l[src_r, src_c]
        touch_r[dst_r, dst_c] |= reach_r[src_r, src_c]
    closed = ~np.asarray(is_open, dtype=bool).reshape(n, n)
    return int(np.count_nonzero(closed & touch_l & touch_r))


def dynamical_first_crossing(state, n, sites, opens):
    """See `_ckernels.dynamical_first_crossing`."""
    if crossing_exists(state, n):
        return -1
    for k in range(len(sites)):
        s = int(sites[k])
        if state[s] == opens[k]:
            continue
        state[s] = opens[k]
        if opens[k] and crossing_exists(state, n):
            return k
    return len(sites)


def itermaj_flip_time(work, m, height):
    """See `_ckernels.itermaj_flip_time`."""
    q = (m - 1) // 2
    level = np.asarray(work, dtype=float)
    for _ in range(height):
        level = np.partition(level.reshape(-1, m), q, axis=1)[:, q]
    return float(level[0])


def connectivity_flip_time(eu, ev, elab, nv):
    """See `_ckernels.connectivity_flip_time`."""
    uf = _UnionFind(nv)
    ncomp = nv
    for i in range(len(eu)):
        if uf.union(int(eu[i]), int(ev[i])):
            ncomp -= 1
            if ncomp == 1:
                return float(elab[i])
    return math.nan


def triangle_flip_time(eu, ev, elab, nv):
    """See `_ckernels.triangle_flip_time`."""
    adj = [0] * nv
    for i in range(len(eu)):
        u, v = int(eu[i]), int(ev[i])
        if adj[u] & adj[v]:
            return float(elab[i])
        adj[u] |= 1 << v
        adj[v] |= 1 << u
    return math.nan


def max_window_value(bits, ell):
    """See `_ckernels.max_window_value`."""
    arr = np.asarray(bits, dtype=np.int64)
    n = arr.shape[0]
    val = np.zeros(n, dtype=np.int64)
    for j in range(ell):
        val = (val << 1) | np.roll(arr, -j)
    return int(val.max())


def window_flip_times(labels, order, ell, thresholds, out):
    """See `_ckernels.window_flip_times`."""
    n = len(labels)
    k = len(thresholds)
    out[:] = math.nan
    cur = 0
    while cur < k and thresholds[cur] <= 0:
        out[cur] = 0.0
        cur += 1
    if cur >= k:
        return
    win = np.zeros(n, dtype=np.int64)
    for j in order:
        j = int(j)
        for o in range(ell):
            w = (j - o) % n
            win[w] |= 1 << (ell - 1 - o)
            while cur < k and win[w] >= thresholds[cur]:
                out[cur] = float(labels[j])
                cur += 1
        if cur >= k:
            break
