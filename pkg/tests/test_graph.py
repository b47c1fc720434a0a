import io
import itertools
from fractions import Fraction

import numpy as np
import pytest

from lpmlab.graph import (
    Graph,
    GraphError,
    annd_by_degree,
    average_path_length,
    component_sizes,
    degree_stats,
    geodesic_histogram,
    global_clustering,
    graph_report,
    read_edge_list,
    triangle_count,
    write_edge_list,
)

from conftest import dense_adjacency, random_graph


def complete(n):
    u, v = np.triu_indices(n, 1)
    return Graph.from_edges(n, u, v)


def star(leaves):
    return Graph.from_edges(leaves + 1, np.zeros(leaves, int), np.arange(1, leaves + 1))


def cycle(n):
    return Graph.from_edges(n, np.arange(n), (np.arange(n) + 1) % n)


def brute_clustering(a):
    n = len(a)
    tri = sum(a[i, j] * a[j, k] * a[i, k] for i, j, k in itertools.combinations(range(n), 3))
    triples = sum(a[c, x] * a[c, y] for c in range(n) for x, y in itertools.combinations([v for v in range(n) if v != c], 2))
    return 0.0 if triples == 0 else 3 * tri / triples


def floyd_warshall(a):
    n = len(a)
    d = np.where(a > 0, 1.0, np.inf)
    np.fill_diagonal(d, 0)
    for k in range(n):
        d = np.minimum(d, d[:, [k]] + d[[k], :])
    return d


def brute_apl(a):
    d = floyd_warshall(a)
    vals = [d[i, j] for i in range(len(a)) for j in range(i + 1, len(a)) if np.isfinite(d[i, j])]
    return sum(vals) / len(vals)


def brute_annd(a):
    deg = a.sum(axis=1)
    by = {}
    for v in range(len(a)):
        if deg[v] == 0:
            continue
        nb = [int(deg[u]) for u in range(len(a)) if a[v, u]]
        by.setdefault(int(deg[v]), []).append(Fraction(sum(nb), len(nb)))
    return {k: float(sum(x) / len(x)) for k, x in by.items()}


def test_small_cases():
    k3 = complete(3)
    assert global_clustering(k3) == 1.0 and average_path_length(k3) == 1.0
    assert global_clustering(star(6)) == 0.0
    p3 = Graph.from_edges(3, [0, 1], [1, 2])
    assert average_path_length(p3) == pytest.approx(4 / 3)
    assert average_path_length(complete(7)) == 1.0
    assert annd_by_degree(star(5)) == {5: 1.0, 1: 5.0}
    assert annd_by_degree(cycle(9)) == {2: 2.0}
    ds = degree_stats(complete(4))
    assert (ds.mean, ds.dispersion, ds.skewness, ds.zero_variance) == (3.0, 0.0, 0.0, True)
    with pytest.raises(GraphError, match="no connected pairs"):
        average_path_length(Graph.from_edges(4, [], []))


def test_edgeless_graph_metrics():
    g = Graph.from_edges(5, [], [])
    assert global_clustering(g) == 0.0
    ds = degree_stats(g)
    assert ds.dispersion == 0.0 and ds.zero_variance
    rep = graph_report(g)
    assert rep.apl is None and rep.component_sizes == [1] * 5


def test_degree_stats_population_convention():
    g = star(4)
    deg = np.array([4, 1, 1, 1, 1], float)
    ds = degree_stats(g)
    m, c = deg.mean(), deg - deg.mean()
    assert ds.mean == m and ds.variance == pytest.approx(np.mean(c ** 2))
    assert ds.skewness == pytest.approx(np.mean(c ** 3) / np.mean(c ** 2) ** 1.5)
    assert ds.histogram.tolist() == [0, 4, 0, 0, 1] and ds.histogram.sum() == 5


def test_random_graph_metrics_match_brute_force(rng):
    for _ in range(100):
        n = int(rng.integers(2, 31))
        g = random_graph(rng, n, rng.uniform(0.02, 0.7))
        a = dense_adjacency(g)
        assert global_clustering(g) == brute_clustering(a)
        assert triangle_count(g) == sum(a[i, j] * a[j, k] * a[i, k] for i, j, k in itertools.combinations(range(n), 3))
        if g.edge_count:
            assert average_path_length(g) == brute_apl(a)
        assert annd_by_degree(g) == brute_annd(a)


def test_bfs_matches_floyd_warshall_up_to_50(rng):
    for _ in range(30):
        n = int(rng.integers(31, 51))
        g = random_graph(rng, n, rng.uniform(0.03, 0.3))
        d = floyd_warshall(dense_adjacency(g))
        iu = np.triu_indices(n, 1)
        fin = d[iu][np.isfinite(d[iu])].astype(int)
        h = geodesic_histogram(g)
        want = np.bincount(fin, minlength=h.size)
        assert np.array_equal(h, want[: h.size]) and want[h.size:].sum() == 0


def test_relabel_invariance(rng):
    for _ in range(20):
        g = random_graph(rng, 25, 0.2)
        h = g.relabel(rng.permutation(g.n))
        assert global_clustering(h) == global_clustering(g)
        if g.edge_count:
            assert average_path_length(h) == average_path_length(g)
        assert annd_by_degree(h) == pytest.approx(annd_by_degree(g))
        assert component_sizes(h) == component_sizes(g)
        assert degree_stats(h).skewness == pytest.approx(degree_stats(g).skewness)


def test_relabel_keeps_labels():
    g = Graph.from_edges(3, [0], [1], labels=["a", "b", "c"])
    h = g.relabel([2, 0, 1])
    assert h.labels == ("b", "c", "a")
    assert h.neighbors(2).tolist() == [0]


def test_graph_invariants(rng):
    g = Graph.from_edges(5, [0, 1, 1, 2, 3, 0], [1, 0, 1, 4, 3, 4])
    a = dense_adjacency(g)
    assert np.array_equal(a, a.T) and np.all(np.diag(a) == 0)
    assert g.edge_count == 3
    for v in range(5):
        nb = g.neighbors(v)
        assert np.all(np.diff(nb) > 0)


def test_component_sizes():
    g = Graph.from_edges(7, [0, 1, 3], [1, 2, 4])
    assert component_sizes(g) == [3, 2, 1, 1]


def test_report_invariants(rng):
    g = random_graph(rng, 40, 0.1)
    rep = graph_report(g)
    assert rep.mean_degree == 2 * rep.edge_count / rep.n
    assert sum(rep.degree_histogram) == rep.n
    d = rep.to_dict()
    assert set(d) >= {"n", "edge_count", "mean_degree", "degree_histogram", "global_clustering", "apl",
                      "annd_by_degree", "dispersion", "skewness", "component_sizes"}
    assert graph_report(g, paths=False).apl is None


def test_er_dispersion_below_one(rng):
    vals = [degree_stats(random_graph(rng, 1000, 0.01)).dispersion for _ in range(100)]
    assert np.mean(vals) < 1


def test_parser_first_appearance_and_counts():
    text = "# comment\nb a\na c\n\nc b\na b\nd d\n"
    g, diag = read_edge_list(io.StringIO(text))
    assert g.labels == ("b", "a", "c", "d")
    assert g.n == 4 and g.edge_count == 3
    assert (diag.lines, diag.self_loops, diag.duplicates) == (5, 1, 1)
    assert g.degrees.tolist() == [2, 2, 2, 0]


def test_parser_errors(tmp_path):
    with pytest.raises(GraphError, match="empty"):
        read_edge_list(io.StringIO("# only a comment\n"))
    with pytest.raises(GraphError, match="line 2"):
        read_edge_list(io.StringIO("a b\nlonely\n"))
    with pytest.raises(OSError):
        read_edge_list(tmp_path / "missing.txt")


def test_round_trip_keeps_isolated_nodes(tmp_path, rng):
    g = random_graph(rng, 30, 0.05)
    path = tmp_path / "g.txt"
    write_edge_list(path, g, comments=["hello"])
    text = path.read_text()
    assert text.startswith("# hello\n# nodes: 30\n")
    h, diag = read_edge_list(path)
    assert h.n == 30 and np.array_equal(h.indices, g.indices) and np.array_equal(h.indptr, g.indptr)
    assert diag.duplicates == 0 and diag.self_loops == 0


def test_custom_labels_round_trip():
    g, _ = read_edge_list(io.StringIO("x y\ny z\n"))
    buf = io.StringIO()
    write_edge_list(buf, g)
    assert buf.getvalue() == "x y\ny z\n"


def test_florentine_data(florentine_path):
    g, diag = read_edge_list(florentine_path)
    assert g.n == 16 and g.edge_count == 20
    assert global_clustering(g) == pytest.approx(9 / 47, rel=1e-14)
    assert average_path_length(g) == pytest.approx(2.48571, abs=1e-5)
    assert degree_stats(g).mean == 2.5
