import os
import subprocess
import sys

import numpy as np
import pytest
from scipy import stats

from lpmlab import _backend, _fallback
from lpmlab.kernel import ErdosRenyi, GaussianLpcm, GaussianLpm, GaussianLpmre, LogisticLpm
from lpmlab.simulate import SimConfig, generate_graph

from conftest import dense_adjacency, random_graph

IMPLS = list(_backend.BACKENDS.items())
needs_core = pytest.mark.skipif("cython" not in _backend.BACKENDS, reason="compiled core not built")
M64 = (1 << 64) - 1


def splitmix(z):
    z = (z + 0x9E3779B97F4A7C15) & M64
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & M64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & M64
    return z ^ (z >> 31)


def test_splitmix_reference_value():
    # first output of the reference splitmix64 generator seeded with 0
    assert splitmix(0) == 0xE220A8397B1DCDAF


@pytest.mark.parametrize("name,impl", IMPLS)
def test_pair_uniform_matches_integer_oracle(name, impl):
    for seed, i, j in [(0, 0, 1), (7, 3, 9), (2 ** 64 - 1, 100, 20000), (12345, 0, 2 ** 31)]:
        key = splitmix(seed)
        u = (splitmix(key ^ ((i << 32) | j)) >> 11) * 2.0 ** -53
        assert impl.pair_uniform(seed, i, j) == u


@needs_core
@pytest.mark.parametrize("spec", [ErdosRenyi(0.3), GaussianLpm(0.9, 0.5, 1.2, 3), GaussianLpmre(1, 1, 3, 0.4),
                                  LogisticLpm(0.7, 1.3), LogisticLpm(-2.0, 0.5),
                                  GaussianLpcm(0.8, 0.4, [(0.5, (1, 0), 0.5), (0.5, (-1, 0), 0.5)])])
def test_backends_emit_identical_edges(spec):
    cfg = SimConfig(150, 11)
    a = generate_graph(spec, cfg, backend="cython")
    b = generate_graph(spec, cfg, backend="python")
    assert np.array_equal(a.indptr, b.indptr) and np.array_equal(a.indices, b.indices)


@pytest.mark.parametrize("name,impl", IMPLS)
def test_sample_edges_contract(name, impl):
    rng = np.random.default_rng(1)
    pos = rng.standard_normal((40, 2))
    eff = np.zeros(40)
    src, dst = impl.sample_edges(_backend.KIND_GAUSSIAN, np.array([1.0, 0.5]), pos, eff, 3, 10, 20)
    assert np.all(src < dst) and np.all((src >= 10) & (src < 20))
    src, dst = impl.sample_edges(_backend.KIND_ER, np.array([1.0, 0.0]), np.zeros((6, 0)), np.zeros(6), 0, 0, 6)
    assert len(src) == 15


@pytest.mark.parametrize("name,impl", IMPLS)
def test_triangles_and_bfs_against_dense_oracle(name, impl, rng):
    for _ in range(10):
        g = random_graph(rng, int(rng.integers(2, 30)), rng.uniform(0.05, 0.6))
        a = dense_adjacency(g)
        assert impl.triangle_count(g.indptr, g.indices) == np.trace(a @ a @ a) // 6
        hist = impl.bfs_histogram(g.indptr, g.indices)
        # oracle: distance via matrix powers
        n = g.n
        dist = np.full((n, n), -1)
        reach = np.eye(n, dtype=bool)
        np.fill_diagonal(dist, 0)
        step = 0
        frontier = reach.copy()
        while frontier.any():
            step += 1
            nxt = (frontier.astype(int) @ a > 0) & ~reach
            dist[nxt] = step
            reach |= nxt
            frontier = nxt
        iu = np.triu_indices(n, 1)
        d = dist[iu]
        want = np.bincount(d[d > 0], minlength=len(hist))
        assert np.array_equal(hist[: len(want)], want[: len(hist)]) and hist.sum() == (d > 0).sum()


@pytest.mark.parametrize("name,impl", IMPLS)
def test_binomial_rows(name, impl):
    th = np.array([0.0, 1e-9, 0.02, 0.3, 0.5, 0.97, 1.0])
    n = 300
    rows = impl.binomial_rows(th, n)
    ref = stats.binom.pmf(np.arange(n)[None, :], n - 1, th[:, None])
    assert rows.shape == (7, n)
    assert np.allclose(rows, ref, rtol=1e-10, atol=1e-290)
    assert rows[0, 0] == 1.0 and rows[-1, -1] == 1.0


@needs_core
def test_binomial_rows_backends_agree():
    th = np.random.default_rng(0).uniform(0, 1, 500)
    a = _backend.BACKENDS["cython"].binomial_rows(th, 2000)
    b = _fallback.binomial_rows(th, 2000)
    assert np.allclose(a, b, rtol=1e-11, atol=1e-300)


def test_env_var_forces_fallback():
    code = "import lpmlab; print(lpmlab.BACKEND)"
    env = dict(os.environ, LPMLAB_BACKEND="python")
    out = subprocess.run([sys.executable, "-c", code], env=env, capture_output=True, text=True, check=True)
    assert out.stdout.strip() == "python"
    env["LPMLAB_BACKEND"] = "bogus"
    bad = subprocess.run([sys.executable, "-c", code], env=env, capture_output=True, text=True)
    assert bad.returncode != 0
