"""Model specifications, isotropic Gaussian utilities and connection kernels.

Every analytic routine in the package is phrased in terms of the objects
defined here. Covariances are always isotropic (``variance * I_d``).
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field, asdict
from typing import Sequence, Union

import numpy as np

__all__ = [
    "ModelError",
    "GaussianLpm",
    "GaussianLpcm",
    "GaussianLpmre",
    "LogisticLpm",
    "ErdosRenyi",
    "MixtureComponent",
    "ModelSpec",
    "LatentPoint",
    "IsotropicGaussian",
    "gaussian_density",
    "log_gaussian_density",
    "gaussian_product",
    "connection_probability",
    "inverse_gamma_from_moments",
    "spec_to_dict",
    "spec_from_dict",
]


class ModelError(ValueError):
    """Invalid model parameters or inconsistent inputs."""


def _check_prob(name, value):
    if not (0.0 <= value <= 1.0) or math.isnan(value):
        raise ModelError(f"{name} must lie in [0, 1], got {value!r}")


def _check_pos(name, value):
    if not value > 0 or math.isinf(value):
        raise ModelError(f"{name} must be a positive finite real, got {value!r}")


def _check_dim(d):
    if int(d) != d or d < 1:
        raise ModelError(f"latent dimension d must be a positive integer, got {d!r}")


@dataclass(frozen=True)
class GaussianLpm:
    """Gaussian latent position model.

    Positions are i.i.d. ``N(0, gamma * I_d)`` and two nodes connect with
    probability ``tau * exp(-|z_i - z_j|^2 / (2 phi))``.
    """

    tau: float
    phi: float
    gamma: float = 1.0
    d: int = 2

    def __post_init__(self):
        _check_prob("tau", self.tau)
        _check_pos("phi", self.phi)
        _check_pos("gamma", self.gamma)
        _check_dim(self.d)

    @property
    def rho(self) -> float:
        """Bandwidth to prior-variance ratio; the only identifiable scale."""
        return self.phi / self.gamma

    def scaled(self, c: float) -> "GaussianLpm":
        return GaussianLpm(self.tau, self.phi * c, self.gamma * c, self.d)


@dataclass(frozen=True)
class MixtureComponent:
    weight: float
    mean: tuple
    gamma: float

    def __post_init__(self):
        object.__setattr__(self, "mean", tuple(float(m) for m in self.mean))
        _check_prob("mixture weight", self.weight)
        _check_pos("component gamma", self.gamma)


@dataclass(frozen=True)
class GaussianLpcm:
    """Gaussian kernel with positions drawn from a finite isotropic mixture."""

    tau: float
    phi: float
    components: tuple
    d: int = 2

    def __post_init__(self):
        comps = tuple(
            c if isinstance(c, MixtureComponent) else MixtureComponent(*c)
            for c in self.components
        )
        object.__setattr__(self, "components", comps)
        _check_prob("tau", self.tau)
        _check_pos("phi", self.phi)
        _check_dim(self.d)
        if not comps:
            raise ModelError("an LPCM needs at least one mixture component")
        for c in comps:
            if len(c.mean) != self.d:
                raise ModelError(
                    f"component mean has length {len(c.mean)}, expected d={self.d}"
                )
        total = sum(c.weight for c in comps)
        if abs(total - 1.0) > 1e-12:
            raise ModelError(f"mixture weights must sum to 1, got {total!r}")

    @property
    def weights(self) -> np.ndarray:
        return np.array([c.weight for c in self.components])

    @property
    def means(self) -> np.ndarray:
        return np.array([c.mean for c in self.components], dtype=float)

    @property
    def gammas(self) -> np.ndarray:
        return np.array([c.gamma for c in self.components])

    def scaled(self, c: float) -> "GaussianLpcm":
        s = math.sqrt(c)
        comps = tuple(
            MixtureComponent(m.weight, tuple(s * x for x in m.mean), m.gamma * c)
            for m in self.components
        )
        return GaussianLpcm(self.tau, self.phi * c, comps, self.d)


@dataclass(frozen=True)
class GaussianLpmre:
    """Gaussian LPM with inverse-gamma nodal random effects.

    The effect ``phi_s`` has shape ``beta0`` and scale ``beta1`` (density
    proportional to ``phi^(-beta0-1) exp(-beta1/phi)``, mean ``beta1/(beta0-1)``).
    Nodes connect with ``tau * exp(-|z_i - z_j|^2 / (2 (phi_i + phi_j)^2))``.
    """

    tau: float
    gamma: float
    beta0: float
    beta1: float
    d: int = 2

    def __post_init__(self):
        _check_prob("tau", self.tau)
        _check_pos("gamma", self.gamma)
        _check_pos("beta0", self.beta0)
        _check_pos("beta1", self.beta1)
        _check_dim(self.d)

    @classmethod
    def from_effect_moments(cls, tau, gamma, mean, variance, d=2):
        beta0, beta1 = inverse_gamma_from_moments(mean, variance)
        return cls(tau, gamma, beta0, beta1, d)

    @property
    def effect_mean(self) -> float:
        return self.beta1 / (self.beta0 - 1) if self.beta0 > 1 else math.inf

    @property
    def has_finite_effect_variance(self) -> bool:
        return self.beta0 > 2

    @property
    def effect_variance(self) -> float:
        if not self.has_finite_effect_variance:
            raise ModelError(
                f"random-effect variance is infinite for beta0={self.beta0} <= 2"
            )
        return self.beta1**2 / ((self.beta0 - 1) ** 2 * (self.beta0 - 2))

    def scaled(self, c: float) -> "GaussianLpmre":
        # kernel variance is (phi_i + phi_j)^2, so effects scale with sqrt(c)
        return GaussianLpmre(self.tau, self.gamma * c, self.beta0, self.beta1 * math.sqrt(c), self.d)


@dataclass(frozen=True)
class LogisticLpm:
    """Logistic link on Euclidean distance, positions ``N(0, gamma I_d)``."""

    alpha: float
    beta: float
    gamma: float = 1.0
    d: int = 2

    def __post_init__(self):
        if not math.isfinite(self.alpha):
            raise ModelError(f"alpha must be finite, got {self.alpha!r}")
        _check_pos("beta", self.beta)
        _check_pos("gamma", self.gamma)
        _check_dim(self.d)


@dataclass(frozen=True)
class ErdosRenyi:
    p: float

    def __post_init__(self):
        _check_prob("p", self.p)

    d = 0


ModelSpec = Union[GaussianLpm, GaussianLpcm, GaussianLpmre, LogisticLpm, ErdosRenyi]

_VARIANTS = {
    "gaussian-lpm": GaussianLpm,
    "lpcm": GaussianLpcm,
    "lpmre": GaussianLpmre,
    "logistic-lpm": LogisticLpm,
    "er": ErdosRenyi,
}
_NAMES = {v: k for k, v in _VARIANTS.items()}


def inverse_gamma_from_moments(mean: float, variance: float) -> tuple[float, float]:
    """Shape/scale of the inverse gamma with the given mean and variance."""
    _check_pos("effect mean", mean)
    _check_pos("effect variance", variance)
    beta0 = mean * mean / variance + 2.0
    return beta0, mean * (beta0 - 1.0)


def spec_to_dict(spec: ModelSpec) -> dict:
    out = {"model": _NAMES[type(spec)]}
    if isinstance(spec, GaussianLpcm):
        out.update(tau=spec.tau, phi=spec.phi, d=spec.d,
                   components=[asdict(c) | {"mean": list(c.mean)} for c in spec.components])
    else:
        out.update(asdict(spec))
    return out


def spec_from_dict(data: dict) -> ModelSpec:
    data = dict(data)
    try:
        cls = _VARIANTS[data.pop("model")]
    except KeyError as exc:
        raise ModelError(f"unknown or missing model name: {exc}") from None
    if cls is GaussianLpcm:
        data["components"] = tuple(
            MixtureComponent(c["weight"], tuple(c["mean"]), c["gamma"]) for c in data["components"]
        )
    return cls(**data)


@dataclass
class LatentPoint:
    position: np.ndarray
    random_effect: float | None = None

    def __post_init__(self):
        self.position = np.atleast_1d(np.asarray(self.position, dtype=float))


@dataclass(frozen=True)
class IsotropicGaussian:
    mean: np.ndarray
    variance: float

    def __post_init__(self):
        object.__setattr__(self, "mean", np.atleast_1d(np.asarray(self.mean, dtype=float)))
        if not self.variance > 0:
            raise ModelError(f"variance must be positive, got {self.variance!r}")

    @property
    def d(self) -> int:
        return self.mean.shape[0]


def log_gaussian_density(sq_dist, variance, d):
    """Log of ``f_d`` given the squared distance to the mean. Vectorised."""
    return -0.5 * d * np.log(2 * np.pi * variance) - np.asarray(sq_dist) / (2 * variance)


def gaussian_density(x, g: IsotropicGaussian) -> float:
    x = np.atleast_1d(np.asarray(x, dtype=float))
    if x.shape[-1] != g.d:
        raise ModelError(f"point has dimension {x.shape[-1]}, density has {g.d}")
    sq = np.sum((x - g.mean) ** 2, axis=-1)
    return np.exp(log_gaussian_density(sq, g.variance, g.d))


def gaussian_product(a: IsotropicGaussian, b: IsotropicGaussian):
    """Write ``f(x; a) f(x; b)`` as ``scale * f(x; result)``.

    Returns ``(scale, result)`` with ``scale = f_d(u - v; 0, a.var + b.var)``.
    """
    if a.d != b.d:
        raise ModelError(f"dimension mismatch: {a.d} vs {b.d}")
    s = a.variance + b.variance
    scale = float(gaussian_density(a.mean - b.mean, IsotropicGaussian(np.zeros(a.d), s)))
    mean = (b.variance * a.mean + a.variance * b.mean) / s
    return scale, IsotropicGaussian(mean, a.variance * b.variance / s)


def connection_probability(spec: ModelSpec, i: LatentPoint, j: LatentPoint) -> float:
    if isinstance(spec, ErdosRenyi):
        return spec.p
    if i.position.shape != (spec.d,) or j.position.shape != (spec.d,):
        raise ModelError(f"latent positions must have length d={spec.d}")
    diff = i.position - j.position
    sq = float(diff @ diff)
    if isinstance(spec, (GaussianLpm, GaussianLpcm)):
        return spec.tau * math.exp(-sq / (2 * spec.phi))
    if isinstance(spec, GaussianLpmre):
        if i.random_effect is None or j.random_effect is None:
            raise ModelError("the LPMRE kernel needs a random effect on both nodes")
        s = i.random_effect + j.random_effect
        return spec.tau * math.exp(-sq / (2 * s * s))
    if isinstance(spec, LogisticLpm):
        # symmetric form of the logistic to avoid overflow for large distances
        eta = spec.alpha - spec.beta * math.sqrt(sq)
        if eta >= 0:
            return 1.0 / (1.0 + math.exp(-eta))
        e = math.exp(eta)
        return e / (1.0 + e)
    raise ModelError(f"unsupported model {type(spec).__name__}")
