"""Benchmark the compiled contraction kernels against the NumPy fallback.

Run:  python3 benchmarks/bench_kernels.py
"""

import time

import numpy as np

from weylprior import _contract_py
from weylprior import get_model
from weylprior.tensors import chart_scores

try:
    from weylprior import _contract
except ImportError:
    _contract = None


def bench(fn, *args, repeats=200):
    best = float("inf")
    for _ in range(5):
        t0 = time.perf_counter()
        for _ in range(repeats):
            fn(*args)
        best = min(best, (time.perf_counter() - t0) / repeats)
    return best


def main():
    rng = np.random.default_rng(0)
    cases = [("gaussian1d point (q=64, m=2)", 64, 2),
             ("gaussian_mv:2 point (q=1024, m=5)", 1024, 5),
             ("large (q=4096, m=9)", 4096, 9)]
    backends = [("numpy", _contract_py)]
    if _contract is not None:
        backends.append(("cython", _contract))

    print(f"{'case':40s} {'kernel':8s} " +
          " ".join(f"{name:>12s}" for name, _ in backends) + "  speedup")
    for label, q, m in cases:
        w = rng.random(q)
        s = rng.standard_normal((q, m))
        for kernel in ("pair_contract", "triple_contract"):
            times = [bench(getattr(impl, kernel), w, s) for _, impl in backends]
            ratio = times[0] / times[-1] if len(times) > 1 else 1.0
            print(f"{label:40s} {kernel.split('_')[0]:8s} " +
                  " ".join(f"{t * 1e6:10.2f}us" for t in times) +
                  f"  {ratio:6.2f}x")

    # end to end: one metric+cubic evaluation per grid point
    model = get_model("gaussian_mv", n=2)
    theta = np.array([0.0, 0.0, 1.0, 0.2, 1.5])
    _, w, s, _ = chart_scores(model, theta)
    for name, impl in backends:
        t = bench(lambda: (impl.pair_contract(w, s), impl.triple_contract(w, s)),
                  repeats=500)
        print(f"metric+cubic contraction ({name}): {t * 1e6:.2f} us/point")


if __name__ == "__main__":
    main()
