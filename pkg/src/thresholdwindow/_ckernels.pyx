# cython: boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled hot kernels: union-find percolation sweeps, graph-edge insertion,
median-tree reduction, and circular-window scans.

Every function here has a pure NumPy/Python mirror in `_kernels_py` with the
same name, signature and (bit-for-bit) results; `kernels` selects the backend
at import time and the test suite asserts equality between the two.
"""

from libc.stdlib cimport malloc, calloc, free
from libc.math cimport NAN

cdef int NBR_DR[6]
cdef int NBR_DC[6]
NBR_DR[0] = -1; NBR_DC[0] = 0
NBR_DR[1] = 1;  NBR_DC[1] = 0
NBR_DR[2] = 0;  NBR_DC[2] = -1
NBR_DR[3] = 0;  NBR_DC[3] = 1
NBR_DR[4] = 1;  NBR_DC[4] = -1
NBR_DR[5] = -1; NBR_DC[5] = 1


cdef inline int _find(int* parent, int x) noexcept nogil:
    while parent[x] != x:
        parent[x] = parent[parent[x]]   # path halving
        x = parent[x]
    return x


cdef inline int _union(int* parent, int* size, int a, int b) noexcept nogil:
    # returns 1 if a merge happened
    a = _find(parent, a)
    b = _find(parent, b)
    if a == b:
        return 0
    if size[a] < size[b]:
        a, b = b, a
    parent[b] = a
    size[a] += size[b]
    return 1


def percolation_flip_time(double[::1] labels, long long[::1] order, int n):
    """Newman-Ziff sweep on the n x n triangular rhombus.

    Inserts all n*n sites in increasing label order (``order`` is the argsort
    of ``labels``), unioning each opened site with its open neighbors and the
    left/right wall nodes.  Returns (flip_time, pivot_site, insertions,
    union_attempts); the flip time is the label at which the walls first
    connect.
    """
    cdef int nsites = n * n
    cdef int left = nsites, right = nsites + 1
    cdef int* parent = <int*> malloc((nsites + 2) * sizeof(int))
    cdef int* size = <int*> malloc((nsites + 2) * sizeof(int))
    cdef unsigned char* is_open = <unsigned char*> calloc(nsites, 1)
    cdef long long step, unions = 0
    cdef int i, j, r, c, k, nr, nc, pivot = -1
    cdef double t = NAN
    cdef bint crossed = False
    if parent == NULL or size == NULL or is_open == NULL:
        free(parent); free(size); free(is_open)
        raise MemoryError
    with nogil:
        for i in range(nsites + 2):
            parent[i] = i
            size[i] = 1
        for step in range(nsites):
            j = <int> order[step]
            r = j / n
            c = j % n
            is_open[j] = 1
            if c == 0:
                unions += 1
                _union(parent, size, j, left)
            if c == n - 1:
                unions += 1
                _union(parent, size, j, right)
            for k in range(6):
                nr = r + NBR_DR[k]
                nc = c + NBR_DC[k]
                if 0 <= nr < n and 0 <= nc < n and is_open[nr * n + nc]:
                    unions += 1
                    _union(parent, size, j, nr * n + nc)
            if not crossed and _find(parent, left) == _find(parent, right):
                crossed = True
                t = labels[j]
                pivot = j
    free(parent); free(size); free(is_open)
    if not crossed:
        return (float('nan'), -1, nsites, unions)
    return (t, pivot, nsites, unions)


cdef bint _crossing(const unsigned char* is_open, int n, int* parent, int* size) noexcept nogil:
    cdef int nsites = n * n
    cdef int left = nsites, right = nsites + 1
    cdef int i, r, c, k, nr, nc
    for i in range(nsites + 2):
        parent[i] = i
        size[i] = 1
    for i in range(nsites):
        if not is_open[i]:
            continue
        r = i / n
        c = i % n
        if c == 0:
            _union(parent, size, i, left)
        if c == n - 1:
            _union(parent, size, i, right)
        # scan half the neighborhood so each adjacent pair is merged once
        for k in range(3):
            nr = r + NBR_DR[2 * k]
            nc = c + NBR_DC[2 * k]
            if 0 <= nr < n and 0 <= nc < n and is_open[nr * n + nc]:
                _union(parent, size, i, nr * n + nc)
            nr = r + NBR_DR[2 * k + 1]
            nc = c + NBR_DC[2 * k + 1]
            if 0 <= nr < n and 0 <= nc < n and is_open[nr * n + nc]:
                _union(parent, size, i, nr * n + nc)
    return _find(parent, left) == _find(parent, right)


def crossing_exists(const unsigned char[::1] is_open, int n):
    """Left-right open crossing of the rhombus under the given site mask."""
    cdef int nsites = n * n
    cdef int* parent = <int*> malloc((nsites + 2) * sizeof(int))
    cdef int* size = <int*> malloc((nsites + 2) * sizeof(int))
    cdef bint out
    if parent == NULL or size == NULL:
        free(parent); free(size)
        raise MemoryError
    with nogil:
        out = _crossing(&is_open[0], n, parent, size)
    free(parent); free(size)
    return bool(out)


def bridging_pivotal_count(const unsigned char[::1] is_open, int n):
    """Pivotal-site count for a configuration with no crossing.

    A closed site is pivotal iff opening it would join a cluster touching the
    left wall to one touching the right wall.  Returns -1 when the
    configuration already crosses (callers pass the color-swapped transpose in
    that case).
    """
    cdef int nsites = n * n
    cdef int left = nsites, right = nsites + 1
    cdef int* parent = <int*> malloc((nsites + 2) * sizeof(int))
    cdef int* size = <int*> malloc((nsites + 2) * sizeof(int))
    cdef int i, r, c, k, nr, nc, root_l, root_r, rt, count = 0
    cdef bint touch_l, touch_r
    if parent == NULL or size == NULL:
        free(parent); free(size)
        raise MemoryError
    with nogil:
        for i in range(nsites + 2):
            parent[i] = i
            size[i] = 1
        for i in range(nsites):
            if not is_open[i]:
                continue
            r = i / n
            c = i % n
            if c == 0:
                _union(parent, size, i, left)
            if c == n - 1:
                _union(parent, size, i, right)
            for k in range(6):
                nr = r + NBR_DR[k]
                nc = c + NBR_DC[k]
                if 0 <= nr < n and 0 <= nc < n and is_open[nr * n + nc]:
                    _union(parent, size, i, nr * n + nc)
    root_l = _find(parent, left)
    root_r = _find(parent, right)
    if root_l == root_r:
        free(parent); free(size)
        return -1
    with nogil:
        for i in range(nsites):
            if is_open[i]:
                continue
            r = i / n
            c = i % n
            touch_l = (c == 0)
            touch_r = (c == n - 1)
            for k in range(6):
                nr = r + NBR_DR[k]
                nc = c + NBR_DC[k]
                if 0 <= nr < n and 0 <= nc < n and is_open[nr * n + nc]:
                    rt = _find(parent, nr * n + nc)
                    if rt == root_l:
                        touch_l = True
                    elif rt == root_r:
                        touch_r = True
            if touch_l and touch_r:
                count += 1
    free(parent); free(size)
    return count


def dynamical_first_crossing(unsigned char[::1] state, int n,
                             const long long[::1] sites,
                             const unsigned char[::1] opens):
    """Replay resampling flips on ``state`` (mutated in place).

    Returns -1 if the initial state already crosses, otherwise the index of
    the first flip after which a crossing exists, or len(sites) if none does.
    Crossing is recomputed only after flips that change a site's state.
    """
    cdef int nsites = n * n
    cdef int* parent = <int*> malloc((nsites + 2) * sizeof(int))
    cdef int* size = <int*> malloc((nsites + 2) * sizeof(int))
    cdef long long k, nflips = sites.shape[0], hit = -2
    cdef int s
    if parent == NULL or size == NULL:
        free(parent); free(size)
        raise MemoryError
    with nogil:
        if _crossing(&state[0], n, parent, size):
            hit = -1
        else:
            hit = nflips
            for k in range(nflips):
                s = <int> sites[k]
                if state[s] == opens[k]:
                    continue
                state[s] = opens[k]
                if opens[k] and _crossing(&state[0], n, parent, size):
                    hit = k
                    break
    free(parent); free(size)
    return hit


def itermaj_flip_time(double[::1] work, int m, int height):
    """Flip time of iterated m-majority: fold the leaf labels level by level,
    replacing each family of m by its ((m+1)/2)-th smallest member.

    ``work`` (length m**height) is clobbered.
    """
    cdef long long sz = work.shape[0]
    cdef long long g, base, out_i
    cdef int lev, j, q = (m - 1) // 2, a, b
    cdef double x
    cdef double* buf = <double*> malloc(m * sizeof(double))
    if buf == NULL:
        raise MemoryError
    with nogil:
        for lev in range(height):
            out_i = 0
            g = 0
            while g < sz:
                # insertion sort of the m-family into buf
                for j in range(m):
                    x = work[g + j]
                    a = j
                    while a > 0 and buf[a - 1] > x:
                        buf[a] = buf[a - 1]
                        a -= 1
                    buf[a] = x
                work[out_i] = buf[q]
                out_i += 1
                g += m
            sz = out_i
    free(buf)
    return work[0]


def connectivity_flip_time(const int[::1] eu, const int[::1] ev,
                           const double[::1] elab, int nv):
    """Label at which the growing graph first becomes connected.

    Edges must be pre-sorted by increasing label.  Returns NaN if the provided
    edges never connect all nv vertices.
    """
    cdef int* parent = <int*> malloc(nv * sizeof(int))
    cdef int* size = <int*> malloc(nv * sizeof(int))
    cdef long long i, ne = eu.shape[0]
    cdef int ncomp = nv
    cdef double out = NAN
    if parent == NULL or size == NULL:
        free(parent); free(size)
        raise MemoryError
    with nogil:
        for i in range(nv):
            parent[i] = <int> i
            size[i] = 1
        for i in range(ne):
            if _union(parent, size, eu[i], ev[i]):
                ncomp -= 1
                if ncomp == 1:
                    out = elab[i]
                    break
    free(parent); free(size)
    return out


def triangle_flip_time(const int[::1] eu, const int[::1] ev,
                       const double[::1] elab, int nv):
    """Label at which the growing graph first contains a triangle.

    Edges must be pre-sorted by increasing label; NaN if no triangle forms.
    """
    cdef unsigned char* adj = <unsigned char*> calloc(<size_t> nv * nv, 1)
    cdef long long i, ne = eu.shape[0]
    cdef int u, v, w
    cdef double out = NAN
    if adj == NULL:
        raise MemoryError
    with nogil:
        for i in range(ne):
            u = eu[i]
            v = ev[i]
            for w in range(nv):
                if adj[u * nv + w] and adj[v * nv + w]:
                    out = elab[i]
                    break
            if out == out:      # found (not NaN)
                break
            adj[u * nv + v] = 1
            adj[v * nv + u] = 1
    free(adj)
    return out


def max_window_value(const unsigned char[::1] bits, int ell):
    """Maximum over all n circular windows of the MSB-first packed integer."""
    cdef long long n = bits.shape[0]
    cdef long long s, best, w
    cdef long long top = 1LL << (ell - 1)
    cdef int j
    with nogil:
        w = 0
        for j in range(ell):
            w = (w << 1) | bits[j % n]
        best = w
        for s in range(1, n):
            w = ((w & (top - 1)) << 1) | bits[(s + ell - 1) % n]
            if w > best:
                best = w
    return best


def window_flip_times(const double[::1] labels, const long long[::1] order,
                      int ell, const long long[::1] thresholds,
                      double[::1] out):
    """Flip times of the circular-window dominance events.

    ``thresholds`` are packed window integers in ascending order; ``out[i]``
    receives the smallest label value at which some window's packed integer
    reaches thresholds[i] (NaN if never, 0.0 if the threshold is <= 0).
    """
    cdef long long n = labels.shape[0]
    cdef int k = <int> thresholds.shape[0]
    cdef long long* win = <long long*> calloc(n, sizeof(long long))
    cdef long long step, j, w
    cdef int o, cur = 0
    if win == NULL:
        raise MemoryError
    for cur in range(k):
        out[cur] = NAN
    cur = 0
    while cur < k and thresholds[cur] <= 0:
        out[cur] = 0.0
        cur += 1
    if cur < k:
        with nogil:
            for step in range(n):
                j = order[step]
                for o in range(ell):
                    w = j - o
                    if w < 0:
                        w += n
                    win[w] |= 1LL << (ell - 1 - o)
                    while cur < k and win[w] >= thresholds[cur]:
                        out[cur] = labels[j]
                        cur += 1
                if cur >= k:
                    break
    free(win)
    return None
