import os

import numpy as np
import pytest

from lpmlab.graph import Graph

DATA = os.path.join(os.path.dirname(__file__), "data")


def random_graph(rng, n, p):
    """Erdos-Renyi style graph built without the library's sampler."""
    iu, ju = np.triu_indices(n, 1)
    keep = rng.random(iu.size) < p
    return Graph.from_edges(n, iu[keep], ju[keep])


def dense_adjacency(g):
    a = np.zeros((g.n, g.n), dtype=int)
    u, v = g.edges()
    a[u, v] = a[v, u] = 1
    return a


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


@pytest.fixture
def florentine_path():
    return os.path.join(DATA, "florentine.txt")


# ------------------------------------------------------ acceptance summary

_CRITERIA = {}


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    mark = item.get_closest_marker("criterion")
    if mark is None or (rep.when != "call" and not rep.failed):
        return
    detail = "; ".join(str(v) for k, v in item.user_properties if k == "detail")
    _CRITERIA[mark.args[0]] = (mark.args[1], "PASS" if rep.passed else "FAIL", detail)


def pytest_terminal_summary(terminalreporter):
    if not _CRITERIA:
        return
    terminalreporter.write_sep("=", "acceptance criteria")
    for num in sorted(_CRITERIA):
        title, status, detail = _CRITERIA[num]
        terminalreporter.write_line(f"criterion {num:>2} {status}  {title}" + (f"  [{detail}]" if detail else ""))
