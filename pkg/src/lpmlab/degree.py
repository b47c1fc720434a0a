"""Degree distribution, factorial moments, dispersion, skewness and ANND.

Integrals over latent positions are taken in standardised coordinates
(positions in units of ``sqrt(gamma)``), so every Gaussian LPM quantity is an
exact function of ``tau``, ``phi / gamma``, ``d`` and ``n``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy import special, stats

from . import _backend
from .kernel import GaussianLpcm, GaussianLpm, GaussianLpmre, ModelError, ModelSpec
from .quadrature import DEFAULT, QuadratureSpec, gauss_kronrod, integrate_2d, integrate_radial

__all__ = [
    "DegreeDistribution",
    "FactorialMoments",
    "DegenerateDistributionError",
    "theta",
    "factorial_moments",
    "mean_degree",
    "degree_pmf",
    "degree_probabilities",
    "dispersion_index",
    "skewness",
    "skewness_from_factorial_moments",
    "annd_of_position",
    "annd_of_degree",
    "annd_curve",
    "pgf_eval",
    "latent_average",
    "LOG_FLOOR",
]

LOG_FLOOR = math.log(1e-300)
# random-effect domain is truncated at this upper-tail probability
EFFECT_TAIL = 1e-8
_EFFECT_LOWER = 1e-14
_ANGLES = 96


class DegenerateDistributionError(ArithmeticError):
    """Moment ratio undefined because the degree variance is zero."""


@dataclass
class FactorialMoments:
    values: np.ndarray

    @property
    def R(self) -> int:
        return len(self.values)

    def __getitem__(self, r):
        """1-based access: ``fm[1]`` is the mean degree."""
        return self.values[r - 1]


@dataclass
class DegreeDistribution:
    n: int
    p: np.ndarray
    mean: float
    variance: float
    dispersion: float
    skewness: float

    def total_variation(self, other) -> float:
        q = other.p if isinstance(other, DegreeDistribution) else np.asarray(other, float)
        m = max(len(self.p), len(q))
        a = np.pad(self.p, (0, m - len(self.p)))
        b = np.pad(q, (0, m - len(q)))
        return 0.5 * float(np.abs(a - b).sum())


def _require(spec, *types):
    if not isinstance(spec, types):
        names = "/".join(t.__name__ for t in types)
        raise ModelError(f"operation supports {names}, got {type(spec).__name__}")


# ---------------------------------------------------------------- neighbour probability

def _theta_lpm_std(spec: GaussianLpm, s):
    rho = spec.rho
    d = spec.d
    return spec.tau * (rho / (1 + rho)) ** (d / 2) * np.exp(-np.asarray(s) ** 2 / (2 * (1 + rho)))


def _theta_lpcm(spec: GaussianLpcm, z):
    """Neighbour probability at absolute positions ``z`` of shape (N, d)."""
    z = np.atleast_2d(z)
    acc = np.zeros(z.shape[0])
    for c in spec.components:
        v = c.gamma + spec.phi
        sq = np.sum((z - np.asarray(c.mean)) ** 2, axis=1)
        acc += c.weight * (spec.phi / v) ** (spec.d / 2) * np.exp(-sq / (2 * v))
    return spec.tau * acc


@lru_cache(maxsize=64)
def _effect_domain(beta0: float) -> tuple[float, float]:
    """Range of ``y = log(phi / beta1)`` kept by the truncated quadrature."""
    lo = stats.invgamma.ppf(_EFFECT_LOWER, beta0)
    hi = stats.invgamma.isf(EFFECT_TAIL, beta0)
    return math.log(lo), math.log(hi)


def _effect_weight(y, beta0):
    """Standardised inverse-gamma density in log coordinates."""
    y = np.asarray(y)
    return np.exp(-beta0 * y - np.exp(-y) - special.gammaln(beta0))


def _theta_lpmre_std(spec: GaussianLpmre, s, y_self, qspec=DEFAULT):
    """Neighbour probability for standardised radii ``s`` and own log-effect ``y_self``.

    The position integral against the partner is done in closed form; the
    partner's random effect is integrated numerically.
    """
    s = np.atleast_1d(np.asarray(s, dtype=float))
    c = spec.beta1 ** 2 / spec.gamma
    e_self = math.exp(y_self)
    half_d = spec.d / 2
    lo, hi = _effect_domain(spec.beta0)

    def g(y):
        w = c * (e_self + np.exp(y)) ** 2
        body = (w / (1 + w))[:, None] ** half_d * np.exp(-(s[None, :] ** 2) / (2 * (1 + w)[:, None]))
        return body * _effect_weight(y, spec.beta0)[:, None]

    # theta varies smoothly in y; a looser relative tolerance keeps nesting cheap
    inner = QuadratureSpec(abs_tol=qspec.abs_tol * 1e-2, rel_tol=qspec.rel_tol * 1e-2,
                           max_subdivisions=qspec.max_subdivisions,
                           radial_cutoff_sigmas=qspec.radial_cutoff_sigmas)
    val, _ = gauss_kronrod(g, lo, hi, inner, initial_panels=12)
    return spec.tau * np.atleast_1d(val)


def theta(spec: ModelSpec, z, random_effect: float | None = None, qspec=DEFAULT):
    """Probability that a random node neighbours a node at latent position ``z``.

    ``z`` may be a position vector (or an array of them) or, for the radially
    symmetric models, a radius.
    """
    if isinstance(spec, GaussianLpm):
        r = _as_radius(z, spec.d)
        return _scalar(_theta_lpm_std(spec, r / math.sqrt(spec.gamma)))
    if isinstance(spec, GaussianLpcm):
        z = np.asarray(z, dtype=float)
        if z.ndim == 0:
            raise ModelError("LPCM positions must be vectors; theta is not radial")
        return _scalar(_theta_lpcm(spec, z.reshape(-1, spec.d)))
    if isinstance(spec, GaussianLpmre):
        if random_effect is None or not random_effect > 0:
            raise ModelError("LPMRE theta needs the node's positive random effect")
        r = _as_radius(z, spec.d)
        y = math.log(random_effect / spec.beta1)
        return _scalar(_theta_lpmre_std(spec, np.atleast_1d(r) / math.sqrt(spec.gamma), y, qspec))
    raise ModelError(f"theta is not available for {type(spec).__name__}")


def _as_radius(z, d):
    z = np.asarray(z, dtype=float)
    if z.ndim == 0:
        return np.abs(z)
    if z.shape[-1] != d:
        raise ModelError(f"position has dimension {z.shape[-1]}, model has d={d}")
    return np.sqrt(np.sum(z ** 2, axis=-1))


def _scalar(x):
    x = np.asarray(x)
    return float(x.reshape(())) if x.size == 1 else x


# ---------------------------------------------------------------- latent averages

def _std_normal_radial(s, d):
    return (2 * np.pi) ** (-d / 2) * np.exp(-(s ** 2) / 2)


def latent_average(spec: ModelSpec, g, qspec: QuadratureSpec = DEFAULT):
    """Expectation of ``g(theta(Z))`` over the latent distribution of one node.

    ``g`` maps an array of neighbour probabilities of shape ``(N,)`` to
    ``(N,)`` or ``(N, m)``.
    """
    if isinstance(spec, GaussianLpm):
        d = spec.d

        def f(s):
            y = np.asarray(g(_theta_lpm_std(spec, s)), dtype=float)
            w = _std_normal_radial(s, d)
            return y * (w if y.ndim == 1 else w[:, None])

        return integrate_radial(f, d, qspec)
    if isinstance(spec, GaussianLpcm):
        return _lpcm_average(spec, g, qspec)
    if isinstance(spec, GaussianLpmre):
        return _lpmre_average(spec, g, qspec)
    raise ModelError(f"no latent quadrature for {type(spec).__name__}")


def _lpcm_average(spec: GaussianLpcm, g, qspec):
    d = spec.d
    if d > 2:
        raise ModelError("LPCM quadrature is implemented for d <= 2 only")
    total = 0.0
    for c in spec.components:
        sd = math.sqrt(c.gamma)
        mu = np.asarray(c.mean)
        if d == 1:
            def f(s):
                th = _theta_lpcm(spec, (mu[0] + sd * s)[:, None])
                y = np.asarray(g(th), dtype=float)
                w = _std_normal_radial(s, 1)
                return y * (w if y.ndim == 1 else w[:, None])

            R = qspec.radial_cutoff_sigmas
            val, _ = gauss_kronrod(f, -R, R, qspec, initial_panels=32)
        else:
            ang = 2 * np.pi * np.arange(_ANGLES) / _ANGLES
            ca, sa = np.cos(ang), np.sin(ang)

            def f(s, ca=ca, sa=sa, mu=mu, sd=sd):
                pts = np.stack([
                    mu[0] + sd * s[:, None] * ca[None, :],
                    mu[1] + sd * s[:, None] * sa[None, :],
                ], axis=-1).reshape(-1, 2)
                y = np.asarray(g(_theta_lpcm(spec, pts)), dtype=float)
                y = y.reshape(s.size, _ANGLES, -1).mean(axis=1)
                y = y * _std_normal_radial(s, 2)[:, None]
                return y[:, 0] if y.shape[1] == 1 else y

            val = integrate_radial(f, 2, qspec)
        total = total + c.weight * np.asarray(val)
    return _scalar(total)


def _lpmre_average(spec: GaussianLpmre, g, qspec):
    d = spec.d
    lo, hi = _effect_domain(spec.beta0)
    R = qspec.radial_cutoff_sigmas
    area = 2 * math.pi ** (d / 2) / math.gamma(d / 2)

    def integrand(s, y):
        return g(_theta_lpmre_std(spec, s, y, qspec))

    return integrate_2d(
        integrand, (0.0, R), (lo, hi), qspec,
        inner_weight=lambda s: area * s ** (d - 1) * _std_normal_radial(s, d),
        outer_weight=lambda y: _effect_weight(y, spec.beta0),
        outer_panels=12,
    )


# ---------------------------------------------------------------- moments

def _log_falling(n, r):
    """log of (n-1)!/(n-r-1)!"""
    return special.gammaln(n) - special.gammaln(n - r)


def factorial_moments(spec: ModelSpec, n: int, R: int, qspec=DEFAULT) -> FactorialMoments:
    if n < 2:
        raise ModelError("need n >= 2")
    if R < 1 or R > n - 1:
        raise ModelError(f"order R={R} must lie in 1..n-1={n - 1}")
    r = np.arange(1, R + 1)
    if isinstance(spec, GaussianLpm):
        if spec.tau == 0:
            return FactorialMoments(np.zeros(R))
        rho = spec.rho
        log_c = (_log_falling(n, r) + r * math.log(spec.tau)
                 + spec.d / 2 * (r * math.log(rho) - (r - 1) * math.log1p(rho) - np.log(r + 1 + rho)))
        return FactorialMoments(np.exp(log_c))
    _require(spec, GaussianLpcm, GaussianLpmre)
    powers = np.atleast_1d(latent_average(spec, lambda th: th[:, None] ** r[None, :], qspec))
    return FactorialMoments(np.exp(_log_falling(n, r)) * powers)


def mean_degree(spec: ModelSpec, n: int, qspec=DEFAULT) -> float:
    if isinstance(spec, GaussianLpm):
        rho = spec.rho
        return (n - 1) * spec.tau * (rho / (2 + rho)) ** (spec.d / 2)
    if isinstance(spec, GaussianLpcm):
        d = spec.d
        acc = 0.0
        for a in spec.components:
            for b in spec.components:
                v = a.gamma + b.gamma + spec.phi
                sq = sum((x - y) ** 2 for x, y in zip(a.mean, b.mean))
                # (2 pi phi)^(d/2) f_d(mu_a - mu_b; 0, v)
                acc += a.weight * b.weight * (spec.phi / v) ** (d / 2) * math.exp(-sq / (2 * v))
        return (n - 1) * spec.tau * acc
    _require(spec, GaussianLpmre)
    return float(factorial_moments(spec, n, 1, qspec)[1])


def skewness_from_factorial_moments(c1, c2, c3) -> float:
    m1 = c1
    m2 = c2 + c1
    m3 = c3 + 3 * m2 - 2 * m1
    var = m2 - m1 * m1
    if not var > 0:
        raise DegenerateDistributionError("degree variance is zero; skewness undefined")
    return (m3 - 3 * m1 * var - m1 ** 3) / var ** 1.5


def skewness(spec: ModelSpec, n: int, qspec=DEFAULT) -> float:
    if n < 4:
        raise ModelError("skewness needs the third factorial moment, i.e. n >= 4")
    c = factorial_moments(spec, n, 3, qspec).values
    return skewness_from_factorial_moments(*c)


def dispersion_index(spec: GaussianLpm, n: int) -> float:
    """Variance-to-mean ratio of the degree, in closed form."""
    _require(spec, GaussianLpm)
    rho = spec.rho
    h = spec.d / 2
    return (1 + (n - 2) * spec.tau * (rho * (2 + rho) / ((1 + rho) * (3 + rho))) ** h
            - (n - 1) * spec.tau * (rho / (2 + rho)) ** h)


def _log_binom_terms(theta_arr, n):
    k = np.arange(n)
    th = np.asarray(theta_arr)[:, None]
    log_c = special.gammaln(n) - special.gammaln(k + 1) - special.gammaln(n - k)
    return log_c[None, :] + special.xlogy(k[None, :], th) + special.xlog1py(n - 1 - k[None, :], -th)


def _binomial(th, n):
    return _backend.impl.binomial_rows(np.ascontiguousarray(th, dtype=float), n)


def degree_probabilities(spec: ModelSpec, n: int, ks, qspec=DEFAULT) -> np.ndarray:
    """``p_k`` for selected degrees only; cheaper than the full pmf for large ``n``."""
    if n < 2:
        raise ModelError("need n >= 2")
    _require(spec, GaussianLpm, GaussianLpcm, GaussianLpmre)
    ks = np.asarray(ks, dtype=np.int64)
    if ks.size == 0 or ks.min() < 0 or ks.max() > n - 1:
        raise ModelError(f"degrees must lie in 0..{n - 1}")
    p = latent_average(spec, lambda th: _binomial(th, n)[:, ks], qspec)
    return np.clip(np.atleast_1d(p), 0.0, 1.0)


def degree_pmf(spec: ModelSpec, n: int, qspec=DEFAULT) -> DegreeDistribution:
    """Distribution of the degree of a randomly chosen node, ``p_0..p_{n-1}``."""
    if n < 2:
        raise ModelError("need n >= 2")
    _require(spec, GaussianLpm, GaussianLpcm, GaussianLpmre)
    p = np.clip(np.atleast_1d(latent_average(spec, lambda th: _binomial(th, n), qspec)), 0.0, 1.0)
    k = np.arange(n)
    if isinstance(spec, GaussianLpm) and spec.tau > 0 and n >= 4:
        c1, c2, c3 = factorial_moments(spec, n, 3).values
        mean = c1
        var = c2 + c1 - c1 * c1
        skew = skewness_from_factorial_moments(c1, c2, c3)
        disp = dispersion_index(spec, n)
    else:
        mean = float(k @ p)
        var = float(((k - mean) ** 2) @ p)
        skew = float(((k - mean) ** 3) @ p) / var ** 1.5 if var > 1e-300 else 0.0
        disp = var / mean if mean > 0 else 1.0
    return DegreeDistribution(n=n, p=p, mean=float(mean), variance=float(var),
                              dispersion=float(disp), skewness=float(skew))


def pgf_eval(spec: ModelSpec, n: int, x: float, qspec=DEFAULT) -> float:
    """``G(x) = E[(x theta + 1 - theta)^(n-1)]`` for ``x`` in [0, 1]."""
    if not 0.0 <= x <= 1.0:
        raise ModelError(f"PGF argument must lie in [0, 1], got {x}")
    _require(spec, GaussianLpm, GaussianLpcm, GaussianLpmre)
    return float(latent_average(
        spec, lambda th: np.exp((n - 1) * np.log1p(-th * (1.0 - x))), qspec))


# ---------------------------------------------------------------- degree correlations

def _annd_std(spec: GaussianLpm, n: int, s):
    """ANND as a function of the standardised radius."""
    rho = spec.rho
    d = spec.d
    v1 = (1 + 3 * rho + rho * rho) / (2 + rho)
    v2 = 1 + rho
    s2 = np.asarray(s, dtype=float) ** 2
    log_ratio = -d / 2 * math.log(v1 / v2) - s2 / (2 * v1) + s2 / (2 * v2)
    kbar = mean_degree(spec, n)
    return 1 + kbar * (n - 2) / (n - 1) * np.exp(log_ratio)


def annd_of_position(spec: GaussianLpm, n: int, z) -> float:
    """Average degree of the neighbours of a node located at ``z``."""
    _require(spec, GaussianLpm)
    r = _as_radius(z, spec.d)
    return _scalar(_annd_std(spec, n, r / math.sqrt(spec.gamma)))


def annd_curve(spec: GaussianLpm, n: int, qspec=DEFAULT, floor: float = LOG_FLOOR):
    """``(k, knn(k), p_k)`` for every degree whose probability clears ``floor``.

    Each degree's weight is rescaled by its peak before integration so the
    ratio is accurate even where ``p_k`` is tiny.
    """
    _require(spec, GaussianLpm)
    d = spec.d
    grid = np.linspace(0, qspec.radial_cutoff_sigmas, 4001)
    log_w = _log_binom_terms(_theta_lpm_std(spec, grid), n) - grid[:, None] ** 2 / 2 \
        + special.xlogy(d - 1, grid)[:, None]
    peak = log_w.max(axis=0)
    area = 2 * math.pi ** (d / 2) / math.gamma(d / 2)
    log_norm = math.log(area) - d / 2 * math.log(2 * math.pi)

    def f(s):
        lw = _log_binom_terms(_theta_lpm_std(spec, s), n) - s[:, None] ** 2 / 2 \
            + special.xlogy(d - 1, s)[:, None] - peak[None, :]
        w = np.exp(lw)
        return np.concatenate([w, w * _annd_std(spec, n, s)[:, None]], axis=1)

    val, _ = gauss_kronrod(f, 0.0, qspec.radial_cutoff_sigmas, qspec, initial_panels=32)
    den, num = val[:n], val[n:]
    log_p = np.log(np.maximum(den, 1e-320)) + peak + log_norm
    ok = (den > 0) & (log_p > floor)
    k = np.arange(n)[ok]
    return k, num[ok] / den[ok], np.exp(log_p[ok])


def annd_of_degree(spec: GaussianLpm, n: int, k: int, qspec=DEFAULT, floor: float = LOG_FLOOR) -> float:
    _require(spec, GaussianLpm)
    if not 0 <= k <= n - 1:
        raise ModelError(f"degree {k} outside 0..{n - 1}")
    ks, knn, _ = annd_curve(spec, n, qspec, floor)
    hit = np.nonzero(ks == k)[0]
    if hit.size == 0:
        raise ModelError(f"degree unreachable: p_{k} is below the underflow floor")
    return float(knn[hit[0]])
