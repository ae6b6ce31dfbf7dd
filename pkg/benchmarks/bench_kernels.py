"""Compare the compiled kernels against the NumPy fallback.

    python benchmarks/bench_kernels.py [--subblocks 200000] [--repeat 5]

Reports the best-of-``repeat`` wall time of each kernel on the same inputs
and checks that both backends return identical arrays.
"""
import argparse
import timeit

import numpy as np

from ofdm_im_dither import _pykernels
from ofdm_im_dither.core import SystemConfig

try:
    from ofdm_im_dither import _kernels
except ImportError:
    _kernels = None


def _inputs(S: int, seed: int):
    cfg = SystemConfig()
    rng = np.random.default_rng(seed)
    pts = np.ascontiguousarray(cfg.constellation.points)
    Y = (rng.standard_normal((S, cfg.n)) + 1j * rng.standard_normal((S, cfg.n))) * 2
    H = (rng.standard_normal((S, cfg.n)) + 1j * rng.standard_normal((S, cfg.n))) / np.sqrt(2)
    d = (rng.standard_normal((S, cfg.n)) + 1j * rng.standard_normal((S, cfg.n)))
    bound = rng.uniform(0.2, 0.8, (S, cfg.n))
    kind = rng.integers(0, 3, (S, cfg.n)).astype(np.int8)
    return cfg, pts, Y, H, d, bound, kind


def _best(fn, repeat: int) -> float:
    return min(timeit.repeat(fn, number=1, repeat=repeat))


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--subblocks", type=int, default=200_000)
    ap.add_argument("--repeat", type=int, default=5)
    ap.add_argument("--seed", type=int, default=1)
    args = ap.parse_args(argv)
    if _kernels is None:
        print("compiled extension not built; only the fallback is available")
        return 1

    cfg, pts, Y, H, d, bound, kind = _inputs(args.subblocks, args.seed)
    book = cfg.codebook
    cases = {
        "ml_detect_batch": (lambda k: k.ml_detect_batch(Y, H, book, pts)),
        "trim_batch": (lambda k: k.trim_batch(d.ravel(), bound.ravel(), kind.ravel())),
    }
    print(f"{args.subblocks} subblocks, best of {args.repeat}")
    print(f"{'kernel':<18}{'cython [ms]':>12}{'python [ms]':>13}{'speedup':>9}  identical")
    for name, call in cases.items():
        a, b = call(_kernels), call(_pykernels)
        a, b = (a if isinstance(a, tuple) else (a,)), (b if isinstance(b, tuple) else (b,))
        same = all(np.array_equal(x, y) for x, y in zip(a, b))
        tc = _best(lambda: call(_kernels), args.repeat) * 1e3
        tp = _best(lambda: call(_pykernels), args.repeat) * 1e3
        print(f"{name:<18}{tc:>12.1f}{tp:>13.1f}{tp / tc:>8.1f}x  {same}")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
