"""Compare the compiled and pure-Python kernel backends.

    python benchmarks/bench_kernels.py --sizes 1024 4096 16384

For each grid size it times wavelet construction (fresh level), a single
decomposition, a reconstruction and an Oslo refinement, and prints the
best-of-``repeat`` wall time per backend with the speedup.
"""

import argparse
import time

import numpy as np

from splinewave import _backend
from splinewave.bspline import Spline, oslo_refine
from splinewave.transform import decompose, reconstruct
from splinewave.wavelets import WaveletParams, build_level, coarsen_grid


def make_case(n, m, mt, seed=0):
    rng = np.random.default_rng(seed)
    h = rng.uniform(0.2, 1.0, n)
    x = np.r_[0.0, np.cumsum(h)[:-1] / h.sum(), 1.0]
    fine = np.r_[np.zeros(m - 1), x, np.ones(m - 1)]
    p = WaveletParams(m, mt, "interval")
    coarse = coarsen_grid(fine, p)
    s = Spline(m, fine, rng.standard_normal((fine.size - m, 1)))
    return p, coarse, fine, s


def best_of(fn, repeat):
    best = np.inf
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - t0)
    return best


def run(sizes, m, mt, repeat):
    backends = _backend.available()
    rows = []
    for n in sizes:
        p, coarse, fine, s = make_case(n, m, mt)
        timings = {}
        for name in backends:
            _backend.use_backend(name)
            level = build_level(coarse, fine, p)
            level.slots()
            dl = decompose(s, level)
            timings[name] = {
                "wavelets": best_of(lambda: build_level(coarse, fine, p).slots(), repeat),
                "decompose": best_of(lambda: decompose(s, level), repeat),
                "reconstruct": best_of(lambda: reconstruct(dl), repeat),
                "oslo": best_of(lambda: oslo_refine(dl.coarse_spline, fine), repeat),
            }
        for stage in ("wavelets", "decompose", "reconstruct", "oslo"):
            row = [n, stage] + [timings[b][stage] for b in backends]
            if len(backends) == 2:
                row.append(timings["python"][stage] / timings["cython"][stage])
            rows.append(row)
    _backend.use_backend(backends[-1])
    head = ["n", "stage"] + [f"{b} [ms]" for b in backends] + (["speedup"] if len(backends) == 2 else [])
    print("  ".join(f"{h:>12}" for h in head))
    for r in rows:
        cells = [f"{r[0]:>12d}", f"{r[1]:>12}"] + [f"{1e3 * v:>12.2f}" for v in r[2:2 + len(backends)]]
        if len(backends) == 2:
            cells.append(f"{r[-1]:>11.1f}x")
        print("  ".join(cells))
    return rows


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--sizes", type=int, nargs="+", default=[1024, 4096, 16384])
    ap.add_argument("--order", type=int, default=4)
    ap.add_argument("--moments", type=int, default=2)
    ap.add_argument("--repeat", type=int, default=3)
    a = ap.parse_args()
    if "cython" not in _backend.available():
        print("compiled kernels not built; timing the Python backend only")
    run(a.sizes, a.order, a.moments, a.repeat)


if __name__ == "__main__":
    main()
