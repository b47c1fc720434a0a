"""Time the compiled core against the numpy fallback on the hot kernels.

    python benchmarks/bench_backends.py [--n 2000] [--repeat 3]
"""
import argparse
import timeit

import numpy as np

from lpmlab import _backend
from lpmlab.kernel import GaussianLpm, GaussianLpmre
from lpmlab.simulate import SimConfig, generate_graph


def best(fn, repeat):
    return min(timeit.repeat(fn, number=1, repeat=repeat))


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--n", type=int, default=2000)
    ap.add_argument("--repeat", type=int, default=3)
    args = ap.parse_args()
    if "cython" not in _backend.BACKENDS:
        raise SystemExit("compiled core not built; run `pip install -e . --no-build-isolation` first")
    n = args.n
    lpm = GaussianLpm(0.9, 0.5)
    re = GaussianLpmre(1, 1, 3, 0.4)
    g = generate_graph(lpm, SimConfig(n, 0))
    theta = np.random.default_rng(0).uniform(0, 1, 400)

    cases = {
        f"sample gaussian n={n}": lambda impl: generate_graph(lpm, SimConfig(n, 1), backend=impl),
        f"sample lpmre n={n}": lambda impl: generate_graph(re, SimConfig(n, 1), backend=impl),
        f"triangles m={g.edge_count}": lambda impl: _backend.BACKENDS[impl].triangle_count(g.indptr, g.indices),
        f"bfs histogram n={n}": lambda impl: _backend.BACKENDS[impl].bfs_histogram(g.indptr, g.indices),
        f"binomial rows 400x{n}": lambda impl: _backend.BACKENDS[impl].binomial_rows(theta, n),
    }
    print(f"{'kernel':<28}{'cython s':>10}{'python s':>10}{'speedup':>9}  same")
    for name, fn in cases.items():
        a, b = fn("cython"), fn("python")
        if hasattr(a, "indices"):
            same = np.array_equal(a.indices, b.indices) and np.array_equal(a.indptr, b.indptr)
        else:
            same = np.allclose(a, b, rtol=1e-11, atol=1e-300)
        tc = best(lambda: fn("cython"), args.repeat)
        tp = best(lambda: fn("python"), args.repeat)
        print(f"{name:<28}{tc:>10.4f}{tp:>10.4f}{tp / tc:>8.1f}x  {'yes' if same else 'NO'}")


if __name__ == "__main__":
    main()
