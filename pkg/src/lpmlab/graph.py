"""Concrete undirected graphs, empirical statistics and the edge-list format."""
from __future__ import annotations

import io
import os
import re
from dataclasses import dataclass, field

import numpy as np
from scipy.sparse import csgraph, csr_matrix

from . import _backend

__all__ = [
    "Graph",
    "GraphError",
    "DegreeStats",
    "GraphReport",
    "EdgeListDiagnostics",
    "global_clustering",
    "triangle_count",
    "geodesic_histogram",
    "average_path_length",
    "annd_by_degree",
    "degree_stats",
    "component_sizes",
    "graph_report",
    "read_edge_list",
    "write_edge_list",
]


class GraphError(ValueError):
    """Malformed input or an undefined statistic."""


def _build_csr(n, src, dst):
    src = np.asarray(src, dtype=np.int64)
    dst = np.asarray(dst, dtype=np.int64)
    if src.shape != dst.shape:
        raise GraphError("edge endpoint arrays differ in length")
    if src.size and (min(src.min(), dst.min()) < 0 or max(src.max(), dst.max()) >= n):
        raise GraphError(f"edge endpoint out of range for n={n}")
    loop = src == dst
    a = np.minimum(src[~loop], dst[~loop])
    b = np.maximum(src[~loop], dst[~loop])
    key = np.unique(a * n + b)
    dups = a.size - key.size
    a, b = key // n, key % n
    # both orientations, sorted by (row, column) through one integer key
    both = np.sort(np.concatenate([key, b * n + a]))
    indices = both % n
    indptr = np.zeros(n + 1, dtype=np.int64)
    np.cumsum(np.bincount(both // n, minlength=n), out=indptr[1:])
    return indptr, indices, int(loop.sum()), int(dups)


@dataclass(frozen=True)
class Graph:
    """Simple undirected graph in compressed sorted-neighbour form."""

    n: int
    indptr: np.ndarray
    indices: np.ndarray
    labels: tuple = field(default=None)

    def __post_init__(self):
        if self.labels is None:
            object.__setattr__(self, "labels", tuple(str(i) for i in range(self.n)))
        if len(self.labels) != self.n:
            raise GraphError("need one label per node")

    @classmethod
    def from_edges(cls, n: int, src, dst, labels=None) -> "Graph":
        """Self-loops and repeated edges are dropped silently; see ``read_edge_list`` for counts."""
        indptr, indices, _, _ = _build_csr(n, src, dst)
        return cls(n, indptr, indices, None if labels is None else tuple(labels))

    @property
    def degrees(self) -> np.ndarray:
        return np.diff(self.indptr)

    @property
    def edge_count(self) -> int:
        return int(self.indices.size // 2)

    def neighbors(self, v: int) -> np.ndarray:
        return self.indices[self.indptr[v]:self.indptr[v + 1]]

    def edges(self) -> tuple[np.ndarray, np.ndarray]:
        """Each edge once as ``(u, v)`` with ``u < v``, in row order."""
        rows = np.repeat(np.arange(self.n, dtype=np.int64), self.degrees)
        keep = rows < self.indices
        return rows[keep], self.indices[keep]

    def relabel(self, perm) -> "Graph":
        """Graph with node ``v`` renamed ``perm[v]``."""
        perm = np.asarray(perm, dtype=np.int64)
        u, v = self.edges()
        labels = [None] * self.n
        for old, new in enumerate(perm):
            labels[new] = self.labels[old]
        return Graph.from_edges(self.n, perm[u], perm[v], labels)

    def to_scipy(self) -> csr_matrix:
        return csr_matrix((np.ones(self.indices.size), self.indices, self.indptr), shape=(self.n, self.n))


def triangle_count(g: Graph) -> int:
    return int(_backend.impl.triangle_count(g.indptr, g.indices))


def global_clustering(g: Graph) -> float:
    """Three times the triangle count over the number of connected triples."""
    deg = g.degrees.astype(float)
    triples = float(np.sum(deg * (deg - 1)) / 2)
    if triples == 0:
        return 0.0
    return 3 * triangle_count(g) / triples


def geodesic_histogram(g: Graph) -> np.ndarray:
    """``h[k]`` = number of unordered connected pairs at distance ``k``; ``h[0] = 0``."""
    return np.asarray(_backend.impl.bfs_histogram(g.indptr, g.indices))


def average_path_length(g: Graph) -> float:
    h = geodesic_histogram(g)
    pairs = h.sum()
    if pairs == 0:
        raise GraphError("no connected pairs")
    return float(np.arange(h.size) @ h / pairs)


def annd_by_degree(g: Graph) -> dict[int, float]:
    """Mean over degree-``k`` nodes of their mean neighbour degree. Isolated nodes are skipped."""
    deg = g.degrees
    rows = np.repeat(np.arange(g.n), deg)
    nbr_sum = np.zeros(g.n, dtype=np.int64)
    np.add.at(nbr_sum, rows, deg[g.indices])
    out = {}
    # all nodes in a class share k, so the mean of ratios is one integer division
    for k in np.unique(deg[deg > 0]):
        nodes = deg == k
        out[int(k)] = int(nbr_sum[nodes].sum()) / (int(k) * int(nodes.sum()))
    return out


@dataclass(frozen=True)
class DegreeStats:
    histogram: np.ndarray
    mean: float
    variance: float
    dispersion: float
    skewness: float
    zero_variance: bool


def degree_stats(g: Graph) -> DegreeStats:
    """Population moments of the degree sequence.

    With zero variance the skewness is undefined; it is reported as 0 and
    flagged. Dispersion is 0 for an edgeless graph.
    """
    deg = g.degrees.astype(float)
    hist = np.bincount(g.degrees, minlength=1)
    mean = float(deg.mean())
    c = deg - mean
    var = float(np.mean(c * c))
    zero = var <= 1e-14 * max(mean * mean, 1.0)
    skew = 0.0 if zero else float(np.mean(c ** 3) / var ** 1.5)
    disp = var / mean if mean > 0 else 0.0
    return DegreeStats(hist, mean, var, disp, skew, bool(zero))


def component_sizes(g: Graph) -> list[int]:
    """Sizes of connected components, largest first."""
    if g.n == 0:
        return []
    _, lab = csgraph.connected_components(g.to_scipy(), directed=False)
    return sorted(np.bincount(lab).tolist(), reverse=True)


@dataclass
class GraphReport:
    n: int
    edge_count: int
    mean_degree: float
    degree_histogram: list
    global_clustering: float
    apl: float | None
    annd_by_degree: dict
    dispersion: float
    skewness: float
    component_sizes: list
    zero_variance: bool = False
    geodesic_histogram: list = field(default_factory=list)

    def to_dict(self) -> dict:
        return {
            "n": self.n,
            "edge_count": self.edge_count,
            "mean_degree": self.mean_degree,
            "degree_histogram": self.degree_histogram,
            "global_clustering": self.global_clustering,
            "apl": self.apl,
            "annd_by_degree": {str(k): v for k, v in self.annd_by_degree.items()},
            "dispersion": self.dispersion,
            "skewness": self.skewness,
            "component_sizes": self.component_sizes,
            "zero_variance": self.zero_variance,
            "geodesic_histogram": self.geodesic_histogram,
        }


def graph_report(g: Graph, paths: bool = True) -> GraphReport:
    ds = degree_stats(g)
    apl, hist = None, []
    if paths:
        h = geodesic_histogram(g)
        last = np.nonzero(h)[0]
        hist = h[: last[-1] + 1].tolist() if last.size else [0]
        if h.sum() > 0:
            apl = float(np.arange(h.size) @ h / h.sum())
    return GraphReport(
        n=g.n,
        edge_count=g.edge_count,
        mean_degree=2 * g.edge_count / g.n if g.n else 0.0,
        degree_histogram=ds.histogram.tolist(),
        global_clustering=global_clustering(g),
        apl=apl,
        annd_by_degree=annd_by_degree(g),
        dispersion=ds.dispersion,
        skewness=ds.skewness,
        component_sizes=component_sizes(g),
        zero_variance=ds.zero_variance,
        geodesic_histogram=hist,
    )


# ---------------------------------------------------------------- edge lists

_NODES_RE = re.compile(r"#\s*nodes\s*[:=]?\s*(\d+)\s*$")


@dataclass(frozen=True)
class EdgeListDiagnostics:
    lines: int
    self_loops: int
    duplicates: int


def _open_text(source):
    if isinstance(source, (str, os.PathLike)):
        return open(source, encoding="utf-8")
    return source


def read_edge_list(source) -> tuple[Graph, EdgeListDiagnostics]:
    """Parse two labels per line; ``#`` starts a comment line.

    Labels become dense indices in order of first appearance. A header
    comment ``# nodes: N`` declares labels ``0..N-1`` up front, which keeps
    isolated nodes of a written graph.
    """
    index: dict[str, int] = {}
    src, dst = [], []
    n_lines = 0
    f = _open_text(source)
    try:
        for lineno, raw in enumerate(f, 1):
            line = raw.strip()
            if not line:
                continue
            if line.startswith("#"):
                m = _NODES_RE.match(line)
                if m and not index:
                    index.update((str(i), i) for i in range(int(m.group(1))))
                continue
            parts = line.split()
            if len(parts) < 2:
                raise GraphError(f"line {lineno}: expected two node labels, got {line!r}")
            ids = []
            for tok in parts[:2]:
                if tok not in index:
                    index[tok] = len(index)
                ids.append(index[tok])
            src.append(ids[0])
            dst.append(ids[1])
            n_lines += 1
    finally:
        if f is not source:
            f.close()
    n = len(index)
    if n == 0:
        raise GraphError("edge list is empty")
    indptr, indices, loops, dups = _build_csr(n, src, dst)
    return Graph(n, indptr, indices, tuple(index)), EdgeListDiagnostics(n_lines, loops, dups)


def write_edge_list(dest, g: Graph, comments=()) -> None:
    """Write one ``u v`` line per edge.

    Graphs with the default labels ``0..n-1`` get a ``# nodes: N`` header so
    isolated nodes survive a round trip.
    """
    u, v = g.edges()
    buf = io.StringIO()
    for c in comments:
        buf.write(f"# {c}\n")
    lab = g.labels
    if lab == tuple(str(i) for i in range(g.n)):
        buf.write(f"# nodes: {g.n}\n")
    for a, b in zip(u.tolist(), v.tolist()):
        buf.write(f"{lab[a]} {lab[b]}\n")
    text = buf.getvalue()
    if isinstance(dest, (str, os.PathLike)):
        with open(dest, "w", encoding="utf-8") as f:
            f.write(text)
    else:
        dest.write(text)
