"""Clustering, k-step path integrals, geodesic distances and average path length.

All path computations run in log space and in standardised coordinates
(``gamma = 1``, ``phi = rho``, positions divided by ``sqrt(gamma)``).
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .kernel import GaussianLpm, ModelError
from .quadrature import McSpec, mc_moments

__all__ = [
    "PathKernelState",
    "PathLengthDistribution",
    "clustering_coefficient",
    "asymptotic_regime",
    "path_kernel",
    "path_integral",
    "log_path_integrals",
    "geodesic_distribution",
    "default_kmax",
    "average_path_length",
    "mean_geodesic_distribution",
    "KMAX_CAP",
]

KMAX_CAP = 64
_SURVIVAL_EPS = 1e-12


def _lpm(spec):
    if not isinstance(spec, GaussianLpm):
        raise ModelError(f"operation requires a GaussianLpm, got {type(spec).__name__}")
    return spec


def clustering_coefficient(spec: GaussianLpm) -> float:
    """Exact global clustering coefficient; independent of ``n``."""
    _lpm(spec)
    rho = spec.rho
    return spec.tau * ((1 + rho) / (3 + rho)) ** (spec.d / 2)


def asymptotic_regime(kbar0: float, tau: float, gamma: float, n: int, d: int):
    """Bandwidth holding the mean degree at ``kbar0`` for size ``n``, and the limiting C."""
    if not (kbar0 > 0 and tau > 0):
        raise ModelError("kbar0 and tau must be positive")
    e = 2.0 / d
    den = ((n - 1) * tau) ** e - kbar0 ** e
    if not den > 0:
        raise ModelError(f"infeasible: mean degree {kbar0} requires more than (n-1)tau={(n - 1) * tau}")
    phi = 2 * kbar0 ** e * gamma / den
    return phi, tau * 3 ** (-d / 2)


@dataclass(frozen=True)
class PathKernelState:
    """Recurrence state after ``k`` steps.

    ``h`` is the prefactor at ``z_i = 0``; for a general start point it is
    ``h * exp(-decay * |z_i|^2)``.
    """

    k: int
    h: float
    alpha: float
    omega: float
    log_h: float
    decay: float


def _recurrence(tau, phi, gamma, d, k):
    """Yield (log_h0, decay, alpha, omega) for steps 1..k."""
    log_step = (math.log(tau) if tau > 0 else -math.inf) + d / 2 * math.log(2 * math.pi * phi)
    alpha, omega = 1.0, phi
    log_h, decay = log_step, 0.0
    out = []
    for _ in range(k):
        out.append((log_h, decay, alpha, omega))
        v = omega + gamma
        # h_{r+1} = h_r tau (2 pi phi)^{d/2} f_d(alpha_r z_i; 0, omega_r + gamma)
        log_h = log_h + log_step - d / 2 * math.log(2 * math.pi * v)
        decay = decay + alpha * alpha / (2 * v)
        alpha, omega = alpha * gamma / v, (omega * phi + omega * gamma + gamma * phi) / v
    return out


def path_kernel(spec: GaussianLpm, k: int) -> list[PathKernelState]:
    _lpm(spec)
    if k < 1:
        raise ModelError("path length k must be at least 1")
    return [
        PathKernelState(r + 1, math.exp(lh), a, w, lh, dec)
        for r, (lh, dec, a, w) in enumerate(_recurrence(spec.tau, spec.phi, spec.gamma, spec.d, k))
    ]


def log_path_integrals(spec: GaussianLpm, kmax: int, zi, zj) -> np.ndarray:
    """``log I_k(z_i, z_j)`` for ``k = 1..kmax``; shape ``(kmax,) + batch``.

    ``zi`` and ``zj`` are arrays of positions with trailing dimension ``d``.
    """
    _lpm(spec)
    d = spec.d
    sg = math.sqrt(spec.gamma)
    zi = np.asarray(zi, dtype=float) / sg
    zj = np.asarray(zj, dtype=float) / sg
    if zi.shape[-1] != d or zj.shape[-1] != d:
        raise ModelError(f"positions must have trailing dimension d={d}")
    zi2 = np.sum(zi * zi, axis=-1)
    steps = _recurrence(spec.tau, spec.rho, 1.0, d, kmax)
    out = np.empty((kmax,) + np.broadcast_shapes(zi2.shape, zj.shape[:-1]))
    for idx, (lh, dec, a, w) in enumerate(steps):
        diff = zj - a * zi
        out[idx] = (lh - dec * zi2 - d / 2 * math.log(2 * math.pi * w)
                    - np.sum(diff * diff, axis=-1) / (2 * w))
    return out


def path_integral(spec: GaussianLpm, k: int, zi, zj) -> float:
    """Probability that one given k-step path between ``z_i`` and ``z_j`` is present."""
    if k < 1:
        raise ModelError("path length k must be at least 1")
    with np.errstate(divide="ignore"):
        val = np.exp(log_path_integrals(spec, k, zi, zj)[-1])
    return float(val) if val.ndim == 0 else val


@dataclass
class PathLengthDistribution:
    ell: np.ndarray
    kmax: int
    connect_mass: float
    apl: float
    apl_std_error: float = 0.0


def _cumulative_reach(log_i: np.ndarray, n: int) -> np.ndarray:
    """Probability of a path of length at most k, for k = 1..kmax.

    A direct edge has probability ``I_1``; for k >= 2 the ``~n^(k-1)``
    candidate k-step paths are treated as independent. The running maximum
    enforces that reachability cannot shrink with k.
    """
    kmax = log_i.shape[0]
    r = np.empty_like(log_i)
    r[0] = np.exp(log_i[0])
    if kmax > 1:
        ks = np.arange(2, kmax + 1).reshape((-1,) + (1,) * (log_i.ndim - 1))
        expo = np.minimum((ks - 1) * math.log(n) + log_i[1:], 700.0)
        r[1:] = -np.expm1(-np.exp(expo))
    return np.maximum.accumulate(r, axis=0)


def _masses(log_i, n):
    r = _cumulative_reach(log_i, n)
    ell = np.diff(r, axis=0, prepend=0.0)
    return ell, r[-1]


def default_kmax(spec: GaussianLpm, n: int, zi=None, zj=None) -> int:
    """Smallest k at which the no-path probability drops below 1e-12."""
    d = spec.d
    zi = np.zeros(d) if zi is None else np.asarray(zi, float)
    zj = np.zeros(d) if zj is None else np.asarray(zj, float)
    cap = max(1, min(KMAX_CAP, n - 1))
    with np.errstate(divide="ignore"):
        log_i = log_path_integrals(spec, cap, zi, zj)
    r = _cumulative_reach(log_i, n)
    hit = np.nonzero(1 - r <= _SURVIVAL_EPS)[0]
    return int(hit[0]) + 1 if hit.size else cap


def geodesic_distribution(spec: GaussianLpm, n: int, zi, zj, kmax: int | None = None) -> PathLengthDistribution:
    """Shortest-path length distribution between nodes at ``z_i`` and ``z_j``, given connection."""
    _lpm(spec)
    if kmax is None:
        kmax = default_kmax(spec, n, zi, zj)
    if kmax >= n or kmax < 1:
        raise ModelError(f"kmax must lie in 1..n-1, got {kmax} for n={n}")
    with np.errstate(divide="ignore"):
        log_i = log_path_integrals(spec, kmax, np.asarray(zi, float), np.asarray(zj, float))
    ell, mass = _masses(log_i, n)
    mass = float(mass)
    if not mass > 0:
        raise ModelError("the two positions are not connected within kmax steps")
    ell = ell / mass
    k = np.arange(1, kmax + 1)
    return PathLengthDistribution(ell=ell, kmax=kmax, connect_mass=mass, apl=float(k @ ell))


def _pair_sampler(d):
    def sample(rng, size):
        return rng.standard_normal((size, 2, d))
    return sample


def _std_spec(spec):
    return GaussianLpm(spec.tau, spec.rho, 1.0, spec.d)


def _conditional_ell(spec_std, n, kmax, pairs):
    with np.errstate(divide="ignore"):
        log_i = log_path_integrals(spec_std, kmax, pairs[:, 0], pairs[:, 1])
    ell, mass = _masses(log_i, n)
    ok = mass > 0
    ell = np.where(ok, ell / np.where(ok, mass, 1.0), 0.0)
    return ell, ok, mass


def _resolve_kmax(n, kmax):
    if kmax is None:
        kmax = min(KMAX_CAP, n - 1)
    if kmax >= n or kmax < 1:
        raise ModelError(f"kmax must lie in 1..n-1, got {kmax} for n={n}")
    return kmax


def average_path_length(spec: GaussianLpm, n: int, kmax: int | None = None,
                        mc: McSpec = McSpec(100_000, 0)) -> tuple[float, float]:
    """Monte Carlo average over latent pairs of the conditional mean geodesic length.

    Pairs whose connection probability underflows to zero within ``kmax``
    steps carry no conditional distribution and are skipped.
    """
    _lpm(spec)
    if spec.tau == 0:
        raise ModelError("tau = 0 gives an empty graph; path lengths are undefined")
    kmax = _resolve_kmax(n, kmax)
    s = _std_spec(spec)
    k = np.arange(1, kmax + 1)

    def f(pairs):
        ell, ok, _ = _conditional_ell(s, n, kmax, pairs)
        return np.stack([np.where(ok, k @ ell, 0.0), ok.astype(float)], axis=1)

    mean, cov = mc_moments(_pair_sampler(spec.d), f, mc)
    a, b = mean
    apl = a / b
    # delta method for the ratio (identical to the plain mean when b == 1)
    var = (cov[0, 0] - 2 * apl * cov[0, 1] + apl * apl * cov[1, 1]) / (b * b)
    return float(apl), float(math.sqrt(max(var, 0.0)))


def mean_geodesic_distribution(spec: GaussianLpm, n: int, kmax: int | None = None,
                               mc: McSpec = McSpec(100_000, 0)) -> PathLengthDistribution:
    """Conditional geodesic distribution averaged over random latent pairs."""
    _lpm(spec)
    if spec.tau == 0:
        raise ModelError("tau = 0 gives an empty graph; path lengths are undefined")
    kmax = _resolve_kmax(n, kmax)
    s = _std_spec(spec)

    def f(pairs):
        ell, ok, mass = _conditional_ell(s, n, kmax, pairs)
        return np.concatenate([ell.T, ok[:, None].astype(float), mass[:, None]], axis=1)

    mean, cov = mc_moments(_pair_sampler(spec.d), f, mc)
    ell = mean[:kmax] / mean[kmax]
    k = np.arange(1, kmax + 1)
    apl_var = float(k @ cov[:kmax, :kmax] @ k) / mean[kmax] ** 2
    return PathLengthDistribution(ell=ell, kmax=kmax, connect_mass=float(mean[kmax + 1]),
                                  apl=float(k @ ell), apl_std_error=math.sqrt(max(apl_var, 0.0)))
