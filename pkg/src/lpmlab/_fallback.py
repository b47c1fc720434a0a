"""Pure-numpy implementations of the compiled kernels in ``_core.pyx``.

Edge sampling reproduces the compiled arithmetic operation for operation, so
both backends emit identical edge lists for the same seed.
"""
from __future__ import annotations

import numpy as np
from scipy import sparse, special
from scipy.sparse import csgraph

KIND_ER, KIND_GAUSSIAN, KIND_LOGISTIC, KIND_LPMRE = 0, 1, 2, 3

_C1 = np.uint64(0x9E3779B97F4A7C15)
_C2 = np.uint64(0xBF58476D1CE4E5B9)
_C3 = np.uint64(0x94D049BB133111EB)
_S30, _S27, _S31, _S11, _S32 = (np.uint64(s) for s in (30, 27, 31, 11, 32))


def _mix(z: np.ndarray) -> np.ndarray:
    # uint64 array arithmetic wraps modulo 2^64, like C
    z = z + _C1
    z = (z ^ (z >> _S30)) * _C2
    z = (z ^ (z >> _S27)) * _C3
    return z ^ (z >> _S31)


def _uniforms(key: np.ndarray, i: int, j: np.ndarray) -> np.ndarray:
    x = _mix(key ^ ((np.uint64(i) << _S32) | j.astype(np.uint64)))
    return (x >> _S11).astype(np.float64) * 1.1102230246251565e-16


def _key(seed: int) -> np.ndarray:
    return _mix(np.array([seed], dtype=np.uint64))


def pair_uniform(seed: int, i: int, j: int) -> float:
    return float(_uniforms(_key(seed), i, np.array([j]))[0])


def _row_probs(kind, a, b, pos, eff, i, j):
    if kind == KIND_ER:
        return np.full(j.size, a)
    d2 = np.zeros(j.size)
    for c in range(pos.shape[1]):
        diff = pos[i, c] - pos[j, c]
        d2 = d2 + diff * diff
    if kind == KIND_GAUSSIAN:
        return a * np.exp(-(d2 / (2.0 * b)))
    if kind == KIND_LPMRE:
        s = eff[i] + eff[j]
        return a * np.exp(-(d2 / (2.0 * s * s)))
    eta = a - b * np.sqrt(d2)
    pos_branch = eta >= 0
    e = np.exp(np.where(pos_branch, -eta, eta))
    return np.where(pos_branch, 1.0 / (1.0 + e), e / (1.0 + e))


def sample_edges(kind, params, pos, eff, seed, row0, row1):
    n = pos.shape[0]
    a, b = float(params[0]), float(params[1])
    key = _key(seed)
    src, dst = [], []
    for i in range(row0, row1):
        j = np.arange(i + 1, n, dtype=np.int64)
        if j.size == 0:
            continue
        hit = j[_uniforms(key, i, j) < _row_probs(kind, a, b, pos, eff, i, j)]
        src.append(np.full(hit.size, i, dtype=np.int64))
        dst.append(hit)
    if not src:
        return np.empty(0, np.int64), np.empty(0, np.int64)
    return np.concatenate(src), np.concatenate(dst)


def _matrix(indptr, indices):
    n = indptr.size - 1
    return sparse.csr_matrix((np.ones(indices.size), indices, indptr), shape=(n, n))


def triangle_count(indptr, indices) -> int:
    a = _matrix(indptr, indices)
    return int(round((a @ a).multiply(a).sum() / 6))


def bfs_histogram(indptr, indices) -> np.ndarray:
    n = indptr.size - 1
    hist = np.zeros(max(n, 1), dtype=np.int64)
    if n < 2:
        return hist
    dist = csgraph.shortest_path(_matrix(indptr, indices), method="D", unweighted=True)
    upper = dist[np.triu_indices(n, 1)]
    upper = upper[np.isfinite(upper)].astype(np.int64)
    hist += np.bincount(upper, minlength=hist.size)[: hist.size]
    return hist


def binomial_rows(theta, n) -> np.ndarray:
    theta = np.asarray(theta, dtype=float)
    m = n - 1
    k = np.arange(n)
    log_c = special.gammaln(n) - special.gammaln(k + 1) - special.gammaln(n - k)
    with np.errstate(divide="ignore", invalid="ignore"):
        lt = np.log(theta)[:, None]
        l1 = np.log1p(-theta)[:, None]
        # masking gives 0 * log(0) = 0 at the ends of the support
        up = np.where(k[None, :] > 0, k[None, :] * lt, 0.0)
        dn = np.where(k[None, :] < m, (m - k)[None, :] * l1, 0.0)
    return np.exp(log_c[None, :] + up + dn)
