"""Seeded graph generation for every model variant.

Latents come from a numpy ``Generator`` seeded with the run seed. Each pair
``(i, j)`` then gets its own uniform from a counter-based hash of
``(seed, i, j)``, so the edge set does not depend on how rows are split
across workers.
"""
from __future__ import annotations

import csv
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from . import _backend
from .graph import Graph
from .kernel import (
    ErdosRenyi,
    GaussianLpcm,
    GaussianLpm,
    GaussianLpmre,
    LatentPoint,
    LogisticLpm,
    ModelError,
)

__all__ = [
    "SimConfig",
    "Latents",
    "CapacityError",
    "sample_latents",
    "latent_arrays",
    "generate_graph",
    "write_latents",
]

# target pairs per row block; fixed so blocking never depends on worker count
_BLOCK_PAIRS = 1 << 20


class CapacityError(MemoryError):
    """The requested graph does not fit in memory."""


@dataclass(frozen=True)
class SimConfig:
    n: int
    seed: int = 0
    emit_latents: bool = False

    def __post_init__(self):
        if int(self.n) != self.n or self.n < 2:
            raise ModelError(f"n must be an integer >= 2, got {self.n!r}")
        if not 0 <= self.seed < 2**64:
            raise ModelError("seed must be a 64-bit unsigned integer")


@dataclass(frozen=True)
class Latents:
    """Positions ``(n, d)`` and, for the LPMRE, the nodal effects ``(n,)``."""

    positions: np.ndarray
    effects: np.ndarray | None = None

    def points(self) -> list[LatentPoint]:
        eff = self.effects
        return [LatentPoint(p, None if eff is None else float(eff[i]))
                for i, p in enumerate(self.positions)]


def latent_arrays(spec, n: int, seed: int) -> Latents:
    rng = np.random.default_rng(seed)
    if isinstance(spec, ErdosRenyi):
        return Latents(np.zeros((n, 0)))
    if isinstance(spec, GaussianLpcm):
        comp = rng.choice(len(spec.components), size=n, p=spec.weights)
        z = rng.standard_normal((n, spec.d))
        pos = spec.means[comp] + z * np.sqrt(spec.gammas[comp])[:, None]
        return Latents(pos)
    if isinstance(spec, (GaussianLpm, GaussianLpmre, LogisticLpm)):
        pos = rng.standard_normal((n, spec.d)) * np.sqrt(spec.gamma)
        if isinstance(spec, GaussianLpmre):
            # inverse gamma(shape beta0, scale beta1) as beta1 / Gamma(beta0, 1)
            return Latents(pos, spec.beta1 / rng.gamma(spec.beta0, size=n))
        return Latents(pos)
    raise ModelError(f"unsupported model {type(spec).__name__}")


def sample_latents(spec, n: int, seed: int) -> list[LatentPoint]:
    return latent_arrays(spec, n, seed).points()


def _kernel_args(spec):
    if isinstance(spec, ErdosRenyi):
        return _backend.KIND_ER, (spec.p, 0.0)
    if isinstance(spec, (GaussianLpm, GaussianLpcm)):
        return _backend.KIND_GAUSSIAN, (spec.tau, spec.phi)
    if isinstance(spec, GaussianLpmre):
        return _backend.KIND_LPMRE, (spec.tau, 0.0)
    if isinstance(spec, LogisticLpm):
        return _backend.KIND_LOGISTIC, (spec.alpha, spec.beta)
    raise ModelError(f"unsupported model {type(spec).__name__}")


def _row_blocks(n):
    """Row ranges holding roughly ``_BLOCK_PAIRS`` pairs each."""
    bounds = [0]
    acc = 0
    for i in range(n):
        acc += n - 1 - i
        if acc >= _BLOCK_PAIRS:
            bounds.append(i + 1)
            acc = 0
    if bounds[-1] != n:
        bounds.append(n)
    return list(zip(bounds[:-1], bounds[1:]))


def generate_graph(spec, config: SimConfig, workers: int = 1, backend: str | None = None):
    """Sample a graph; returns ``Graph``, or ``(Graph, Latents)`` with ``emit_latents``.

    ``backend`` picks ``"cython"`` or ``"python"`` explicitly; by default the
    import-time choice is used. Output is identical for any ``workers``.
    """
    impl = _backend.impl if backend is None else _backend.BACKENDS[backend]
    n = config.n
    lat = latent_arrays(spec, n, config.seed)
    kind, params = _kernel_args(spec)
    params = np.array(params, dtype=float)
    pos = np.ascontiguousarray(lat.positions, dtype=float)
    eff = np.ascontiguousarray(lat.effects if lat.effects is not None else np.zeros(n), dtype=float)
    blocks = _row_blocks(n)

    def run(block):
        return impl.sample_edges(kind, params, pos, eff, config.seed, block[0], block[1])

    try:
        if workers > 1 and len(blocks) > 1:
            with ThreadPoolExecutor(max_workers=workers) as pool:
                parts = list(pool.map(run, blocks))
        else:
            parts = [run(b) for b in blocks]
        src = np.concatenate([p[0] for p in parts])
        dst = np.concatenate([p[1] for p in parts])
        g = Graph.from_edges(n, src, dst)
    except MemoryError as exc:
        raise CapacityError(f"graph with n={n} exceeds available memory") from exc
    return (g, lat) if config.emit_latents else g


def write_latents(dest, lat: Latents) -> None:
    """CSV with ``node_id, z_1..z_d`` and ``phi`` for random-effect models."""
    d = lat.positions.shape[1]
    header = ["node_id"] + [f"z_{c + 1}" for c in range(d)]
    if lat.effects is not None:
        header.append("phi")
    close = isinstance(dest, (str, os.PathLike))
    f = open(dest, "w", newline="", encoding="utf-8") if close else dest
    try:
        w = csv.writer(f)
        w.writerow(header)
        for i, p in enumerate(lat.positions):
            row = [i] + [repr(float(x)) for x in p]
            if lat.effects is not None:
                row.append(repr(float(lat.effects[i])))
            w.writerow(row)
    finally:
        if close:
            f.close()
