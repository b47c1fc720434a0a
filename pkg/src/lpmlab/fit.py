"""Moment matching for the Gaussian LPM and an experimental LPMRE tail fit."""
from __future__ import annotations

import itertools
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .degree import degree_probabilities, mean_degree
from .kernel import GaussianLpm, GaussianLpmre, ModelError
from .quadrature import QuadratureError, QuadratureSpec
from .structure import clustering_coefficient

__all__ = [
    "FitResult",
    "InfeasibleFitError",
    "TailFitResult",
    "fit_lpm",
    "fit_lpmre_tail",
    "tail_grid",
    "RHO_BRACKET",
]

RHO_BRACKET = (1e-9, 1e9)
_GRID_POINTS = 241


class InfeasibleFitError(ModelError):
    """No parameter pair in the admissible region reproduces the targets."""


@dataclass(frozen=True)
class FitResult:
    tau: float
    rho: float
    residual_kbar: float
    residual_C: float
    feasible: bool
    iterations: int
    d: int = 2

    def spec(self, gamma: float = 1.0) -> GaussianLpm:
        return GaussianLpm(self.tau, self.rho * gamma, gamma, self.d)


def _tau_of(rho, c_obs, d):
    return c_obs * ((3 + rho) / (1 + rho)) ** (d / 2)


def fit_lpm(n: int, kbar_obs: float, C_obs: float, d: int = 2, gamma: float = 1.0) -> FitResult:
    """Gaussian LPM whose mean degree and clustering equal the targets.

    Clustering fixes ``tau`` as a function of ``rho``; the mean-degree
    equation is then solved for ``rho`` by bisection in ``log rho``.
    ``gamma`` only sets the internal scale; the returned ``rho`` does not
    depend on it.
    """
    if not 0 < C_obs <= 1:
        raise ModelError(f"clustering must lie in (0, 1], got {C_obs}")
    if not kbar_obs > 0:
        raise ModelError(f"mean degree must be positive, got {kbar_obs}")
    if kbar_obs >= n - 1:
        # mean degree is at most (n-1) tau, with equality only in the limit rho -> inf
        raise InfeasibleFitError(
            f"infeasible: implied τ exceeds 1 (k̄={kbar_obs} needs τ ≥ k̄/(n-1) = {kbar_obs / (n - 1):.6g})")

    def spec(log_rho):
        rho = math.exp(log_rho)
        return GaussianLpm(min(_tau_of(rho, C_obs, d), 1.0), rho * gamma, gamma, d)

    def excess(log_rho):
        # tau is evaluated unclipped here so the map stays monotone past tau = 1
        rho = math.exp(log_rho)
        kb = (n - 1) * _tau_of(rho, C_obs, d) * (rho / (2 + rho)) ** (d / 2)
        return kb - kbar_obs

    lo, hi = (math.log(b) for b in RHO_BRACKET)
    grid = np.linspace(lo, hi, _GRID_POINTS)
    vals = np.array([excess(x) for x in grid])
    if np.all(np.diff(vals) > 0):
        if not (vals[0] < 0 < vals[-1]):
            raise InfeasibleFitError(
                f"infeasible (k̄, C) pair: k̄={kbar_obs} is not reachable "
                f"(mean degree tends to (n-1)C={(n - 1) * C_obs:.6g} as rho grows)")
    else:
        # monotonicity failed numerically: take the first sign change on the grid
        idx = np.nonzero(np.sign(vals[:-1]) * np.sign(vals[1:]) <= 0)[0]
        if idx.size == 0:
            raise InfeasibleFitError("infeasible (k̄, C) pair: no sign change on the bracket")
        lo, hi = grid[idx[0]], grid[idx[0] + 1]
        if vals[idx[0] + 1] < 0:
            lo, hi = hi, lo
    f_lo = excess(lo)
    it = 0
    while it < 200:
        mid = 0.5 * (lo + hi)
        if mid in (lo, hi):
            break
        f_mid = excess(mid)
        it += 1
        if f_mid == 0:
            lo = hi = mid
            break
        if (f_mid < 0) == (f_lo < 0):
            lo, f_lo = mid, f_mid
        else:
            hi = mid
    x = 0.5 * (lo + hi)
    rho = math.exp(x)
    tau = _tau_of(rho, C_obs, d)
    if tau > 1 + 1e-12:
        raise InfeasibleFitError(
            f"infeasible: implied τ exceeds 1 (τ={tau:.6g} at rho={rho:.6g})")
    s = spec(x)
    r_k = mean_degree(s, n) - kbar_obs
    r_c = clustering_coefficient(s) - C_obs
    return FitResult(tau=s.tau, rho=rho, residual_kbar=r_k, residual_C=r_c,
                     feasible=True, iterations=it, d=d)


# ---------------------------------------------------------------- LPMRE tail fit

@dataclass
class TailFitResult:
    """Best grid cell for the degree tail. Experimental."""

    spec: GaussianLpmre
    loss: float
    degrees: np.ndarray
    table: list = field(default_factory=list)
    experimental: bool = True


def tail_grid(gammas, beta0s, beta1s, d: int = 2) -> list[tuple[float, float, float]]:
    return [(float(g), float(b0), float(b1)) for g, b0, b1 in itertools.product(gammas, beta0s, beta1s)]


def _fit_qspec(qspec):
    return qspec if qspec is not None else QuadratureSpec(abs_tol=1e-12, rel_tol=1e-6)


def fit_lpmre_tail(histogram, n: int, grid, d: int = 2, min_count: int = 5,
                   qspec: QuadratureSpec | None = None, workers: int = 1) -> TailFitResult:
    """Exhaustive search over ``(gamma, beta0, beta1)`` cells with ``tau = 1``.

    The loss is the mean squared difference between log empirical
    frequencies and log model probabilities over degrees seen at least
    ``min_count`` times. Ties go to the smaller ``beta1``, then the
    lexicographically smaller ``(gamma, beta0)``.
    """
    hist = np.asarray(histogram, dtype=float)
    if n < 100:
        raise ModelError("the tail fit needs a graph with n >= 100")
    if hist.sum() != n:
        raise ModelError(f"histogram counts sum to {hist.sum():g}, expected n={n}")
    ks = np.nonzero(hist >= min_count)[0]
    if ks.size == 0:
        raise ModelError(f"no degree is observed at least {min_count} times; empty admissible range")
    ks = ks[ks <= n - 1]
    target = np.log(hist[ks] / n)
    cells = [tuple(map(float, c)) for c in grid]
    if not cells:
        raise ModelError("parameter grid is empty")
    q = _fit_qspec(qspec)

    def loss(cell):
        gamma, beta0, beta1 = cell
        spec = GaussianLpmre(1.0, gamma, beta0, beta1, d)
        try:
            p = degree_probabilities(spec, n, ks, q)
        except QuadratureError:
            return math.inf
        if np.any(p <= 0):
            return math.inf
        return float(np.mean((np.log(p) - target) ** 2))

    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            losses = list(pool.map(loss, cells))
    else:
        losses = [loss(c) for c in cells]
    order = sorted(range(len(cells)), key=lambda i: (losses[i], cells[i][2], cells[i][0], cells[i][1]))
    best = order[0]
    if not math.isfinite(losses[best]):
        raise ModelError("no grid cell gives a finite loss")
    g, b0, b1 = cells[best]
    table = [{"gamma": c[0], "beta0": c[1], "beta1": c[2], "loss": l} for c, l in zip(cells, losses)]
    return TailFitResult(GaussianLpmre(1.0, g, b0, b1, d), losses[best], ks, table)
