"""Time the batched ESS-H kernel: compiled extension vs numpy fallback.

Usage::

    python3 benchmarks/bench_kernels.py [--rows 200] [--n 1000] [--repeat 5]

The input mimics one harness chunk: normalized weights from a shifted
Gaussian proposal, evaluated on the default order grid.
"""

import argparse
import time

import numpy as np

from esskit import _fallback
from esskit.harness import beta_grid

try:
    from esskit import _kernels
except ImportError:
    _kernels = None


def harness_weights(rows, n, seed=0):
    rng = np.random.default_rng(seed)
    x = rng.standard_normal((rows, n)) + 1.5
    lw = -0.5 * x**2 + 0.5 * (x - 1.5) ** 2
    w = np.exp(lw - lw.max(axis=1, keepdims=True))
    return w / w.sum(axis=1, keepdims=True)


def best_of(fn, args, repeat):
    times = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn(*args)
        times.append(time.perf_counter() - t0)
    return min(times)


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--rows", type=int, default=200)
    ap.add_argument("--n", type=int, default=1000)
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args(argv)

    w = harness_weights(args.rows, args.n)
    betas = np.asarray(beta_grid())
    print(f"rows={args.rows} n={args.n} orders={betas.size}")

    t_py = best_of(_fallback.ess_h_batch, (w, betas), args.repeat)
    print(f"python  {t_py * 1e3:10.1f} ms")
    if _kernels is None:
        print("cython  (extension not built)")
        return 0
    t_cy = best_of(_kernels.ess_h_batch, (w, betas), args.repeat)
    diff = np.max(
        np.abs(_kernels.ess_h_batch(w, betas) / _fallback.ess_h_batch(w, betas) - 1.0)
    )
    print(f"cython  {t_cy * 1e3:10.1f} ms   speedup {t_py / t_cy:.1f}x   max rel diff {diff:.1e}")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
