# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled kernels: pair sampling, triangle counting and all-pairs BFS.

Must stay bit-compatible with ``_fallback.py``; the per-pair uniform is a
splitmix64 hash of (seed, i, j) and probabilities use the same operation order.
"""
import numpy as np
cimport numpy as cnp
from libc.math cimport exp, lgamma, log, log1p, sqrt
from libc.stdint cimport int64_t, uint8_t, uint64_t
from libcpp.vector cimport vector

cnp.import_array()

cdef enum:
    KIND_ER = 0
    KIND_GAUSSIAN = 1
    KIND_LOGISTIC = 2
    KIND_LPMRE = 3


cdef inline uint64_t _mix(uint64_t z) noexcept nogil:
    z = z + <uint64_t>0x9E3779B97F4A7C15ULL
    z = (z ^ (z >> 30)) * <uint64_t>0xBF58476D1CE4E5B9ULL
    z = (z ^ (z >> 27)) * <uint64_t>0x94D049BB133111EBULL
    return z ^ (z >> 31)


cdef inline double _uniform(uint64_t key, uint64_t i, uint64_t j) noexcept nogil:
    cdef uint64_t x = _mix(key ^ ((i << 32) | j))
    return <double>(x >> 11) * 1.1102230246251565e-16


def pair_uniform(uint64_t seed, uint64_t i, uint64_t j):
    return _uniform(_mix(seed), i, j)


def sample_edges(int kind, double[::1] params, double[:, ::1] pos, double[::1] eff,
                 uint64_t seed, Py_ssize_t row0, Py_ssize_t row1):
    """Edges ``(i, j)``, ``i < j``, for rows ``row0 <= i < row1``."""
    cdef Py_ssize_t n = pos.shape[0]
    cdef Py_ssize_t d = pos.shape[1]
    cdef Py_ssize_t i, j, c
    cdef double d2, diff, p, s, eta, e
    cdef double a = params[0]
    cdef double b = params[1]
    cdef uint64_t key = _mix(seed)
    cdef vector[int64_t] src
    cdef vector[int64_t] dst
    with nogil:
        for i in range(row0, row1):
            for j in range(i + 1, n):
                if kind == KIND_ER:
                    p = a
                else:
                    d2 = 0.0
                    for c in range(d):
                        diff = pos[i, c] - pos[j, c]
                        d2 = d2 + diff * diff
                    if kind == KIND_GAUSSIAN:
                        p = a * exp(-(d2 / (2.0 * b)))
                    elif kind == KIND_LPMRE:
                        s = eff[i] + eff[j]
                        p = a * exp(-(d2 / (2.0 * s * s)))
                    else:
                        eta = a - b * sqrt(d2)
                        if eta >= 0:
                            p = 1.0 / (1.0 + exp(-eta))
                        else:
                            e = exp(eta)
                            p = e / (1.0 + e)
                if _uniform(key, i, j) < p:
                    src.push_back(i)
                    dst.push_back(j)
    out_src = np.empty(src.size(), dtype=np.int64)
    out_dst = np.empty(dst.size(), dtype=np.int64)
    cdef int64_t[::1] vs = out_src
    cdef int64_t[::1] vd = out_dst
    for i in range(<Py_ssize_t>src.size()):
        vs[i] = src[i]
        vd[i] = dst[i]
    return out_src, out_dst


def triangle_count(int64_t[::1] indptr, int64_t[::1] indices):
    """Number of triangles; neighbour lists must be sorted."""
    cdef Py_ssize_t n = indptr.shape[0] - 1
    cdef Py_ssize_t u, v, k, t, lo, hi, mid
    cdef int64_t total = 0
    mark_arr = np.zeros(max(n, 1), dtype=np.uint8)
    cdef uint8_t[::1] mark = mark_arr
    with nogil:
        for u in range(n):
            # mark the neighbours above u, then count them inside each N(v), v > u
            for k in range(indptr[u], indptr[u + 1]):
                if indices[k] > u:
                    mark[indices[k]] = 1
            for k in range(indptr[u], indptr[u + 1]):
                v = indices[k]
                if v <= u:
                    continue
                lo = indptr[v]
                hi = indptr[v + 1]
                while lo < hi:
                    mid = (lo + hi) // 2
                    if indices[mid] <= v:
                        lo = mid + 1
                    else:
                        hi = mid
                for t in range(lo, indptr[v + 1]):
                    total += mark[indices[t]]
            for k in range(indptr[u], indptr[u + 1]):
                mark[indices[k]] = 0
    return total


def bfs_histogram(int64_t[::1] indptr, int64_t[::1] indices):
    """Counts of unordered connected pairs by geodesic distance (index = distance)."""
    cdef Py_ssize_t n = indptr.shape[0] - 1
    hist = np.zeros(max(n, 1), dtype=np.int64)
    cdef int64_t[::1] h = hist
    dist_arr = np.empty(n, dtype=np.int64)
    queue_arr = np.empty(n, dtype=np.int64)
    cdef int64_t[::1] dist = dist_arr
    cdef int64_t[::1] queue = queue_arr
    cdef Py_ssize_t s, head, tail, u, v, k, t
    with nogil:
        for s in range(n):
            for t in range(n):
                dist[t] = -1
            dist[s] = 0
            queue[0] = s
            head = 0
            tail = 1
            while head < tail:
                u = queue[head]
                head += 1
                for k in range(indptr[u], indptr[u + 1]):
                    v = indices[k]
                    if dist[v] < 0:
                        dist[v] = dist[u] + 1
                        queue[tail] = v
                        tail += 1
                        # each unordered pair is counted from its smaller end
                        if v > s:
                            h[dist[v]] += 1
    return hist


def binomial_rows(double[::1] theta, Py_ssize_t n):
    """Row ``a`` holds the Binomial(n - 1, theta[a]) pmf over ``k = 0..n-1``.

    Terms are generated outward from the mode by the ratio recurrence and
    the sweep stops once they fall below 1e-300 (left as zero).
    """
    cdef Py_ssize_t N = theta.shape[0]
    cdef Py_ssize_t m = n - 1
    out_arr = np.zeros((N, n), dtype=np.float64)
    cdef double[:, ::1] out = out_arr
    cdef Py_ssize_t a, k, mode
    cdef double t, odds, p0, p
    with nogil:
        for a in range(N):
            t = theta[a]
            if t <= 0.0:
                out[a, 0] = 1.0
                continue
            if t >= 1.0:
                out[a, m] = 1.0
                continue
            mode = <Py_ssize_t>((m + 1) * t)
            if mode > m:
                mode = m
            p0 = exp(lgamma(m + 1.0) - lgamma(mode + 1.0) - lgamma(<double>(m - mode) + 1.0)
                     + mode * log(t) + (m - mode) * log1p(-t))
            out[a, mode] = p0
            odds = t / (1.0 - t)
            p = p0
            for k in range(mode, m):
                p = p * ((m - k) / (k + 1.0)) * odds
                if p < 1e-300:
                    break
                out[a, k + 1] = p
            p = p0
            for k in range(mode, 0, -1):
                p = p * (k / (m - k + 1.0)) / odds
                if p < 1e-300:
                    break
                out[a, k - 1] = p
    return out_arr
