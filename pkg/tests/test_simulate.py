import io
import math

import numpy as np
import pytest
from scipy import stats

from lpmlab import simulate
from lpmlab.degree import mean_degree
from lpmlab.graph import degree_stats, global_clustering
from lpmlab.kernel import ErdosRenyi, GaussianLpcm, GaussianLpm, GaussianLpmre, LogisticLpm, ModelError
from lpmlab.simulate import SimConfig, generate_graph, latent_arrays, sample_latents, write_latents

from conftest import dense_adjacency


def test_config_validation():
    with pytest.raises(ModelError):
        SimConfig(1)
    with pytest.raises(ModelError):
        SimConfig(10, -1)
    with pytest.raises(ModelError):
        SimConfig(10, 2 ** 64)
    SimConfig(2, 2 ** 64 - 1)


def test_latent_chi_square_mean():
    z = latent_arrays(GaussianLpm(1, 1), 10 ** 5, 3).positions
    q = np.sum(z * z, axis=1)
    assert abs(q.mean() - 2) < 3 * q.std() / math.sqrt(q.size)


def test_latent_scale_follows_gamma():
    z = latent_arrays(GaussianLpm(1, 1, 4.0, 3), 10 ** 5, 3).positions
    q = np.sum(z * z, axis=1)
    assert abs(q.mean() - 12) < 3 * q.std() / math.sqrt(q.size)


def test_lpcm_single_weight_component():
    m = GaussianLpcm(1, 1, [(1.0, (5.0, 5.0), 0.01), (0.0, (-5.0, -5.0), 0.01)])
    z = latent_arrays(m, 500, 1).positions
    assert np.all(np.abs(z - 5) < 1)


def test_lpmre_effect_mean():
    eff = latent_arrays(GaussianLpmre(1, 1, 3, 0.4), 10 ** 5, 2).effects
    # the variance is finite for beta0 = 3 (0.04), so the usual s.e. applies
    assert abs(eff.mean() - 0.2) < 3 * eff.std() / math.sqrt(eff.size)
    assert np.all(eff > 0)


def test_sample_latents_points():
    pts = sample_latents(GaussianLpmre(1, 1, 3, 0.4), 5, 0)
    assert len(pts) == 5 and all(p.random_effect is not None for p in pts)
    assert sample_latents(ErdosRenyi(0.5), 3, 0)[0].position.shape == (0,)


def test_trivial_graphs():
    assert generate_graph(GaussianLpm(0, 1), SimConfig(30, 1)).edge_count == 0
    g = generate_graph(ErdosRenyi(1.0), SimConfig(5, 1))
    assert g.edge_count == 10
    assert generate_graph(ErdosRenyi(0.0), SimConfig(5, 1)).edge_count == 0


@pytest.mark.parametrize("spec", [GaussianLpm(0.9, 0.5), GaussianLpcm(0.8, 0.4, [(0.5, (1, 0), 0.5), (0.5, (-1, 0), 0.5)]),
                                  GaussianLpmre(1, 1, 3, 0.4), LogisticLpm(1.0, 1.5), ErdosRenyi(0.2)])
def test_symmetry_no_loops_determinism(spec):
    cfg = SimConfig(60, 7)
    g = generate_graph(spec, cfg)
    a = dense_adjacency(g)
    assert np.array_equal(a, a.T) and np.all(np.diag(a) == 0)
    h = generate_graph(spec, cfg)
    assert np.array_equal(g.indptr, h.indptr) and np.array_equal(g.indices, h.indices)
    assert not np.array_equal(g.indices, generate_graph(spec, SimConfig(60, 8)).indices)


def test_workers_do_not_change_output(monkeypatch):
    monkeypatch.setattr(simulate, "_BLOCK_PAIRS", 500)
    spec = GaussianLpm(0.9, 0.5)
    a = generate_graph(spec, SimConfig(300, 4), workers=1)
    assert len(simulate._row_blocks(300)) > 10
    b = generate_graph(spec, SimConfig(300, 4), workers=4)
    assert np.array_equal(a.indices, b.indices) and np.array_equal(a.indptr, b.indptr)


def test_row_blocks_cover_triangle():
    for n in (2, 3, 1500, 3000):
        blocks = simulate._row_blocks(n)
        assert blocks[0][0] == 0 and blocks[-1][1] == n
        assert all(a[1] == b[0] for a, b in zip(blocks, blocks[1:]))


def test_edge_rate_matches_kernel():
    # pair latents are shared within a graph, so use replicate-level densities for the s.e.
    spec = LogisticLpm(0.5, 1.0)
    n, reps = 8, 4000
    dens = [generate_graph(spec, SimConfig(n, s)).edge_count / (n * (n - 1) / 2) for s in range(reps)]
    z = np.random.default_rng(0).standard_normal((10 ** 6, 2, 2))
    p = 1 / (1 + np.exp(-(0.5 - np.linalg.norm(z[:, 0] - z[:, 1], axis=1))))
    se = math.hypot(np.std(dens, ddof=1) / math.sqrt(reps), p.std() / 1000)
    assert abs(np.mean(dens) - p.mean()) < 3 * se


def test_er_edge_count_chi_square():
    n, p, reps = 20, 0.3, 1000
    m = n * (n - 1) // 2
    counts = np.array([generate_graph(ErdosRenyi(p), SimConfig(n, s)).edge_count for s in range(reps)])
    expected = stats.binom.pmf(np.arange(m + 1), m, p) * reps
    observed = np.bincount(counts, minlength=m + 1).astype(float)
    # pool adjacent edge counts into cells with at least 5 expected replicates
    obs, exp = [], []
    acc_o = acc_e = 0.0
    for o, e in zip(observed, expected):
        acc_o += o
        acc_e += e
        if acc_e >= 5:
            obs.append(acc_o)
            exp.append(acc_e)
            acc_o = acc_e = 0.0
    obs[-1] += acc_o
    exp[-1] += acc_e
    pval = stats.chisquare(obs, exp).pvalue
    assert pval > 1e-3


def test_er_dispersion_below_one():
    g = generate_graph(ErdosRenyi(0.5), SimConfig(400, 3))
    assert degree_stats(g).dispersion < 1


def test_mean_degree_and_clustering_oracle():
    spec = GaussianLpm(1, 1)
    n, reps = 200, 100
    kb, cc = [], []
    for s in range(reps):
        g = generate_graph(spec, SimConfig(n, s))
        kb.append(2 * g.edge_count / n)
        cc.append(global_clustering(g))
    assert abs(np.mean(kb) - 199 / 3) < 3 * np.std(kb, ddof=1) / math.sqrt(reps)
    assert abs(np.mean(cc) - 0.5) < 3 * np.std(cc, ddof=1) / math.sqrt(reps) + 0.005


def test_lpmre_mean_degree_oracle():
    spec = GaussianLpmre(1, 1, 3, 0.4)
    n, reps = 300, 60
    kb = [2 * generate_graph(spec, SimConfig(n, s)).edge_count / n for s in range(reps)]
    assert abs(np.mean(kb) - mean_degree(spec, n)) < 3 * np.std(kb, ddof=1) / math.sqrt(reps)


def test_emit_latents_and_csv():
    spec = GaussianLpmre(1, 1, 3, 0.4)
    g, lat = generate_graph(spec, SimConfig(10, 5, emit_latents=True))
    assert lat.positions.shape == (10, 2) and lat.effects.shape == (10,)
    buf = io.StringIO()
    write_latents(buf, lat)
    lines = buf.getvalue().splitlines()
    assert lines[0] == "node_id,z_1,z_2,phi"
    assert len(lines) == 11
    back = np.array([[float(x) for x in ln.split(",")[1:]] for ln in lines[1:]])
    assert np.array_equal(back[:, :2], lat.positions) and np.array_equal(back[:, 2], lat.effects)
    buf = io.StringIO()
    write_latents(buf, latent_arrays(GaussianLpm(1, 1, 1, 3), 4, 0))
    assert buf.getvalue().splitlines()[0] == "node_id,z_1,z_2,z_3"
