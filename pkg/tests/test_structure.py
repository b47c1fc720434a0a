import math

import numpy as np
import pytest

from lpmlab.degree import mean_degree
from lpmlab.graph import average_path_length as graph_apl
from lpmlab.kernel import GaussianLpm, ModelError
from lpmlab.quadrature import McSpec
from lpmlab.simulate import SimConfig, generate_graph
from lpmlab.structure import (
    asymptotic_regime,
    average_path_length,
    clustering_coefficient,
    default_kmax,
    geodesic_distribution,
    log_path_integrals,
    mean_geodesic_distribution,
    path_integral,
    path_kernel,
)


def clustering_mc(spec, samples, rng, block=10 ** 6):
    """Ratio estimate E[r12 r13 r23] / E[r12 r13] over latent triples, with delta-method s.e."""
    sums = np.zeros(5)
    done = 0
    sg = math.sqrt(spec.gamma)
    while done < samples:
        m = min(block, samples - done)
        z = rng.standard_normal((m, 3, spec.d)) * sg
        r = lambda a, b: spec.tau * np.exp(-np.sum((z[:, a] - z[:, b]) ** 2, axis=1) / (2 * spec.phi))
        t = r(0, 1) * r(0, 2)
        x = t * r(1, 2)
        sums += [x.sum(), t.sum(), (x * x).sum(), (t * t).sum(), (x * t).sum()]
        done += m
    mx, mt, xx, tt, xt = sums / samples
    c = mx / mt
    var = ((xx - mx * mx) - 2 * c * (xt - mx * mt) + c * c * (tt - mt * mt)) / (samples * mt * mt)
    return c, math.sqrt(var)


def hermite_grid(gamma, d, m=80):
    x, w = np.polynomial.hermite_e.hermegauss(m)
    x = x * math.sqrt(gamma)
    w = w / w.sum()
    mesh = np.meshgrid(*([x] * d), indexing="ij")
    pts = np.stack([a.ravel() for a in mesh], axis=1)
    wts = np.prod(np.meshgrid(*([w] * d), indexing="ij"), axis=0).ravel()
    return pts, wts


def test_clustering_values():
    assert clustering_coefficient(GaussianLpm(0.810, 0.232)) == pytest.approx(0.810 * 1.232 / 3.232, rel=1e-14)
    assert clustering_coefficient(GaussianLpm(0.37, 1e12)) == pytest.approx(0.37, rel=1e-9)
    assert clustering_coefficient(GaussianLpm(1, 1)) == 0.5
    s = GaussianLpm(0.6, 0.7, 1.9, 3)
    assert clustering_coefficient(s) == clustering_coefficient(s.scaled(1e3))


@pytest.mark.parametrize("spec", [GaussianLpm(1, 1), GaussianLpm(0.5, 0.3, 2.0, 1), GaussianLpm(0.9, 4.0, 0.5, 3)])
def test_clustering_triple_integral_oracle(spec, rng):
    c, se = clustering_mc(spec, 10 ** 6, rng)
    assert abs(c - clustering_coefficient(spec)) < 3 * se


def test_asymptotic_regime():
    phi, climit = asymptotic_regime(10, 1, 1, 10 ** 6, 2)
    assert climit == pytest.approx(1 / 3)
    for n in (50, 1000, 10 ** 5):
        phi, _ = asymptotic_regime(10, 0.8, 2.0, n, 2)
        assert mean_degree(GaussianLpm(0.8, phi, 2.0), n) == pytest.approx(10, rel=1e-10)
    for d in (1, 3):
        phi, _ = asymptotic_regime(7, 0.9, 1.0, 500, d)
        assert mean_degree(GaussianLpm(0.9, phi, 1.0, d), 500) == pytest.approx(7, rel=1e-10)
    phi, _ = asymptotic_regime(10, 1, 1, 10 ** 6, 2)
    assert abs(clustering_coefficient(GaussianLpm(1, phi)) - 1 / 3) < 1e-3
    with pytest.raises(ModelError, match="infeasible"):
        asymptotic_regime(50, 0.5, 1, 100, 2)


def test_path_kernel_states():
    k1 = path_kernel(GaussianLpm(0.7, 0.4, 1.0, 2), 1)[0]
    assert (k1.alpha, k1.omega) == (1.0, 0.4)
    assert k1.h == pytest.approx(0.7 * 2 * math.pi * 0.4, rel=1e-14)
    st = path_kernel(GaussianLpm(1, 1), 2)
    assert st[1].alpha == pytest.approx(0.5) and st[1].omega == pytest.approx(1.5)
    phi, gamma = 0.6, 1.7
    st = path_kernel(GaussianLpm(1, phi, gamma), 200)
    assert st[-1].omega == pytest.approx((phi + math.sqrt(phi * phi + 4 * gamma * phi)) / 2, rel=1e-12)
    a = [s.alpha for s in st[:30]]
    w = [s.omega for s in st[:30]]
    assert np.all(np.diff(a) < 0) and np.all(np.diff(w) > 0)
    with pytest.raises(ModelError):
        path_kernel(GaussianLpm(1, 1), 0)


def test_path_integral_base_case(rng):
    s = GaussianLpm(0.8, 0.5, 1.3, 2)
    for _ in range(10):
        zi, zj = rng.normal(size=2), rng.normal(size=2)
        assert path_integral(s, 1, zi, zj) == pytest.approx(0.8 * math.exp(-np.sum((zi - zj) ** 2) / 1.0), rel=1e-12)


def test_two_step_integral_grid_oracle():
    # I_2(0, 0) = int f_2(x; 0, 1) r(0, x) r(x, 0) dx = int f_2(x; 0, 1) exp(-|x|^2) dx = 1/3
    s = GaussianLpm(1, 1)
    x = np.linspace(-12, 12, 1201)
    X, Y = np.meshgrid(x, x, indexing="ij")
    q2 = X ** 2 + Y ** 2
    grid = np.trapezoid(np.trapezoid(np.exp(-q2 / 2) / (2 * math.pi) * np.exp(-q2), x, axis=1), x)
    assert grid == pytest.approx(1 / 3, abs=1e-6)
    assert path_integral(s, 2, [0, 0], [0, 0]) == pytest.approx(grid, abs=1e-6)


@pytest.mark.parametrize("k", [1, 2])
@pytest.mark.parametrize("spec", [GaussianLpm(1, 1), GaussianLpm(0.7, 0.4, 1.6), GaussianLpm(0.9, 2.5, 0.8)])
def test_chapman_identity(spec, k):
    pts, wts = hermite_grid(spec.gamma, 2)
    for zi, zj in [([0, 0], [0, 0]), ([0.5, -0.3], [1.0, 0.2]), ([-1.2, 0.4], [0.3, 0.9])]:
        zi, zj = np.array(zi), np.array(zj)
        r = spec.tau * np.exp(-np.sum((pts - zj) ** 2, axis=1) / (2 * spec.phi))
        ik = path_integral(spec, k, np.broadcast_to(zi, pts.shape), pts)
        assert path_integral(spec, k + 1, zi, zj) == pytest.approx(np.sum(wts * r * ik), abs=1e-6, rel=1e-8)


def test_path_integral_nonincreasing():
    for phi in (0.2, 0.5, 1.0):
        vals = [path_integral(GaussianLpm(1, phi), k, [0, 0], [0, 0]) for k in range(1, 11)]
        assert np.all(np.diff(vals) <= 1e-15)


def test_path_integrals_batched_match_scalar(rng):
    s = GaussianLpm(0.9, 0.5)
    zi, zj = rng.normal(size=(7, 2)), rng.normal(size=(7, 2))
    batch = log_path_integrals(s, 5, zi, zj)
    for t in range(7):
        for k in range(1, 6):
            assert math.exp(batch[k - 1, t]) == pytest.approx(path_integral(s, k, zi[t], zj[t]), rel=1e-12)
    with pytest.raises(ModelError):
        log_path_integrals(s, 3, np.zeros(3), np.zeros(3))


def test_geodesic_distribution_normalisation():
    s = GaussianLpm(0.9, 0.5)
    for zi, zj in [([0, 0], [0, 0]), ([1, 0], [-1, 0.5]), ([2.5, 0], [-2.5, 0])]:
        dist = geodesic_distribution(s, 100, zi, zj)
        assert np.all(dist.ell >= -1e-12)
        assert dist.ell.sum() == pytest.approx(1, abs=1e-9)
        assert dist.apl == pytest.approx(np.arange(1, dist.kmax + 1) @ dist.ell)
        assert dist.ell[0] * dist.connect_mass == pytest.approx(path_integral(s, 1, zi, zj), rel=1e-12)
    with pytest.raises(ModelError):
        geodesic_distribution(s, 10, [0, 0], [0, 0], kmax=10)


def test_default_kmax():
    assert default_kmax(GaussianLpm(1, 1), 200) == 1
    s = GaussianLpm(0.5, 0.3)
    k = default_kmax(s, 200)
    li = log_path_integrals(s, k, np.zeros(2), np.zeros(2))
    reach = lambda j: -math.expm1(-math.exp((j - 1) * math.log(200) + li[j - 1]))
    assert k > 1 and reach(k) >= 1 - 1e-12 and reach(k - 1) < 1 - 1e-12
    assert default_kmax(GaussianLpm(0.01, 0.01), 20) == 19


def test_apl_table_values():
    apl, se = average_path_length(GaussianLpm(0.810, 0.232), 62)
    assert abs(apl - 3.282) < 0.15 and se < 0.01
    apl, _ = average_path_length(GaussianLpm(0.763, 2.115), 18)
    assert abs(apl - 1.724) < 0.1


def test_apl_properties():
    s = GaussianLpm(0.8, 0.5, 2.0)
    a = average_path_length(s, 100, mc=McSpec(20_000, 5))
    assert a == average_path_length(s, 100, mc=McSpec(20_000, 5))
    assert a[0] >= 1
    # the generic estimator with the geodesic distribution agrees
    g = mean_geodesic_distribution(s, 100, mc=McSpec(20_000, 5))
    assert g.ell.sum() == pytest.approx(1)
    assert g.apl == pytest.approx(a[0], rel=1e-10)
    vals = [average_path_length(GaussianLpm(0.8, phi), 100, mc=McSpec(20_000, 1))[0] for phi in (2.0, 0.5, 0.2, 0.08)]
    assert np.all(np.diff(vals) > 0)
    with pytest.raises(ModelError):
        average_path_length(GaussianLpm(0, 1), 10)


def test_apl_er_limit_matches_simulation():
    s = GaussianLpm(0.5, 1e6)
    n = 200
    apl, se_mc = average_path_length(s, n, mc=McSpec(20_000, 2))
    sims = [graph_apl(generate_graph(s, SimConfig(n, seed))) for seed in range(100)]
    se = math.hypot(np.std(sims, ddof=1) / 10, se_mc)
    assert abs(np.mean(sims) - apl) < 3 * se + 1e-3
