"""Numerical integration: radial reduction, adaptive Gauss-Kronrod, seeded Monte Carlo.

The adaptive rule is a batched G7/K15 scheme. Integrands are called with a
whole array of abscissae at once and may return vector values, so a full
degree distribution (``n`` outputs) is integrated in one pass.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

__all__ = [
    "QuadratureSpec",
    "McSpec",
    "QuadratureError",
    "gauss_kronrod",
    "integrate_radial",
    "integrate_2d",
    "mc_expectation",
    "mc_moments",
    "sphere_area",
]


class QuadratureError(ArithmeticError):
    """Adaptive quadrature ran out of subdivisions."""

    def __init__(self, message, estimate=None, error=None):
        super().__init__(message)
        self.estimate = estimate
        self.error = error


@dataclass(frozen=True)
class QuadratureSpec:
    abs_tol: float = 1e-10
    rel_tol: float = 1e-8
    max_subdivisions: int = 2000
    radial_cutoff_sigmas: float = 12.0

    def __post_init__(self):
        if not (self.abs_tol > 0 and self.rel_tol > 0):
            raise ValueError("quadrature tolerances must be positive")
        if self.max_subdivisions < 1:
            raise ValueError("max_subdivisions must be positive")
        if self.radial_cutoff_sigmas < 6:
            raise ValueError("radial_cutoff_sigmas must be at least 6")


@dataclass(frozen=True)
class McSpec:
    samples: int
    seed: int = 0
    block: int = 1 << 16

    def __post_init__(self):
        if self.samples < 1:
            raise ValueError("Monte Carlo needs at least one sample")
        if not 0 <= self.seed < 2**64:
            raise ValueError("seed must be a 64-bit unsigned integer")


DEFAULT = QuadratureSpec()

# Kronrod 15-point abscissae on [-1, 1] (positive half, descending) and weights.
_XGK = np.array([
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144845693013,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.000000000000000000000000000000000,
])
_WGK = np.array([
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714,
])
_WG = np.array([
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327,
])
_NODES = np.concatenate([-_XGK[:-1], _XGK[::-1]])
_KW = np.concatenate([_WGK[:-1], _WGK[::-1]])
_GW = np.zeros(15)
_GW[1:7:2] = _WG[:3]
_GW[7] = _WG[3]
_GW[9:15:2] = _WG[2::-1]


def _panel_rules(lo, hi, f):
    half = 0.5 * (hi - lo)
    mid = 0.5 * (hi + lo)
    x = (mid[:, None] + half[:, None] * _NODES[None, :]).ravel()
    y = np.asarray(f(x), dtype=float)
    scalar = y.ndim == 1
    y = y.reshape(lo.size, 15, -1)
    k = np.einsum("j,pjm->pm", _KW, y) * half[:, None]
    g = np.einsum("j,pjm->pm", _GW, y) * half[:, None]
    return k, np.abs(k - g), scalar


def gauss_kronrod(f: Callable, a: float, b: float, spec: QuadratureSpec = DEFAULT,
                  initial_panels: int = 8, breakpoints=None):
    """Adaptive G7/K15 integral of a vectorised, possibly vector-valued ``f``.

    ``f`` maps an array of abscissae of shape ``(N,)`` to ``(N,)`` or
    ``(N, m)``. Returns ``(value, error)``; ``value`` is a float when ``f``
    is scalar-valued. The error is the max-norm over components.
    """
    if breakpoints is None:
        edges = np.linspace(a, b, initial_panels + 1)
    else:
        edges = np.unique(np.concatenate([[a, b], np.asarray(breakpoints, float)]))
        edges = edges[(edges >= min(a, b)) & (edges <= max(a, b))]
    lo, hi = edges[:-1].copy(), edges[1:].copy()
    vals, errs, scalar = _panel_rules(lo, hi, f)
    done_val = np.zeros(vals.shape[1])
    done_err = np.zeros(vals.shape[1])
    n_panels = lo.size
    while True:
        total = done_val + vals.sum(axis=0)
        err_vec = done_err + errs.sum(axis=0)
        tol = max(spec.abs_tol, spec.rel_tol * float(np.max(np.abs(total))))
        if float(np.max(err_vec)) <= tol:
            break
        if n_panels >= spec.max_subdivisions:
            est = total[0] if total.size == 1 else total
            raise QuadratureError(
                f"no convergence after {n_panels} panels (error {np.max(err_vec):.3g}, tol {tol:.3g})",
                est, float(np.max(err_vec)))
        panel_err = errs.max(axis=1)
        # retire panels that are already negligible, split the rest
        share = tol / max(n_panels, 1)
        split = panel_err > 0.5 * share
        if not split.any():
            split[np.argmax(panel_err)] = True
        keep = ~split
        done_val += vals[keep].sum(axis=0)
        done_err += errs[keep].sum(axis=0)
        slo, shi = lo[split], hi[split]
        mid = 0.5 * (slo + shi)
        lo = np.concatenate([slo, mid])
        hi = np.concatenate([mid, shi])
        n_panels += int(split.sum())
        vals, errs, _ = _panel_rules(lo, hi, f)
    err = float(np.max(err_vec))
    if scalar:
        return float(total[0]), err
    return total, err


def sphere_area(d: int) -> float:
    """Surface area of the unit sphere in R^d."""
    return 2 * math.pi ** (d / 2) / math.gamma(d / 2)


def integrate_radial(f: Callable, d: int, spec: QuadratureSpec = DEFAULT,
                     scale: float = 1.0, breakpoints=None):
    """Integral over R^d of a radial function, ``S_{d-1} int_0^R f(r) r^(d-1) dr``.

    ``scale`` is the reference standard deviation; the domain is truncated at
    ``spec.radial_cutoff_sigmas * scale``.
    """
    R = spec.radial_cutoff_sigmas * scale
    area = sphere_area(d)

    def g(r):
        y = np.asarray(f(r), dtype=float)
        w = area * r ** (d - 1)
        return y * (w if y.ndim == 1 else w[:, None])

    bp = None if breakpoints is None else np.asarray(breakpoints) * 1.0
    val, _ = gauss_kronrod(g, 0.0, R, spec, initial_panels=16, breakpoints=bp)
    return val


def integrate_2d(f: Callable, inner: tuple, outer: tuple, spec: QuadratureSpec = DEFAULT,
                 inner_weight: Callable | None = None, outer_weight: Callable | None = None,
                 inner_panels: int = 16, outer_panels: int = 16):
    """Nested adaptive integral ``int w_o(u) int w_i(r) f(r, u) dr du``.

    The inner integral over ``r`` is evaluated at every outer abscissa ``u``;
    ``f(r_array, u)`` is vectorised over ``r``.
    """
    a_in, b_in = inner
    a_out, b_out = outer

    def inner_integral(u):
        def g(r):
            y = np.asarray(f(r, u), dtype=float)
            if inner_weight is None:
                return y
            w = inner_weight(r)
            return y * (w if y.ndim == 1 else w[:, None])

        val, _ = gauss_kronrod(g, a_in, b_in, spec, initial_panels=inner_panels)
        return np.atleast_1d(val)

    def outer_fn(us):
        rows = np.array([inner_integral(u) for u in us])
        if outer_weight is not None:
            rows = rows * outer_weight(us)[:, None]
        return rows

    val, _ = gauss_kronrod(outer_fn, a_out, b_out, spec, initial_panels=outer_panels)
    val = np.atleast_1d(val)
    return float(val[0]) if val.size == 1 else val


def _block_rng(seed: int, block: int) -> np.random.Generator:
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence(seed, spawn_key=(block,))))


def mc_moments(sampler: Callable, f: Callable, mc: McSpec):
    """Mean vector and covariance of the mean for a vector-valued ``f``.

    Draws are generated in fixed blocks, block ``b`` from a stream keyed by
    ``(seed, b)``, so results do not depend on evaluation order.
    """
    n_done = 0
    mean = None
    m2 = None
    b = 0
    while n_done < mc.samples:
        size = min(mc.block, mc.samples - n_done)
        x = sampler(_block_rng(mc.seed, b), size)
        y = np.asarray(f(x), dtype=float).reshape(size, -1)
        bm = y.mean(axis=0)
        dev = y - bm
        bm2 = dev.T @ dev
        if mean is None:
            mean, m2 = bm, bm2
        else:
            tot = n_done + size
            delta = bm - mean
            mean = mean + delta * (size / tot)
            m2 = m2 + bm2 + np.outer(delta, delta) * (n_done * size / tot)
        n_done += size
        b += 1
    cov = m2 / max(n_done - 1, 1) / n_done
    return mean, cov


def mc_expectation(sampler: Callable, f: Callable, mc: McSpec) -> tuple[float, float]:
    """Sample mean and standard error of a scalar ``f`` under ``sampler``."""
    mean, cov = mc_moments(sampler, f, mc)
    return float(mean[0]), float(math.sqrt(max(cov[0, 0], 0.0)))
