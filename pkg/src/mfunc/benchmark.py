"""Benchmark the numba kernels against their pure-numpy twins.

Run as `python -m mfunc.benchmark [--repeat N]`. Each kernel is executed on
a fixed representative workload with both variants; the table reports the
best-of-N wall time per variant and the speedup. Results double as a
correctness spot check: the variants must agree to float tolerance.
"""

from __future__ import annotations

import argparse
import time

import numpy as np

from ._backend import HAS_NUMBA
from ._kernels import kernel_variants


def _workloads():
    rng = np.random.Generator(np.random.Philox(7))
    tgrid = 0.05 * np.arange(20000)
    logn = np.log(np.arange(2, 2002, dtype=np.float64))
    amp = np.arange(2, 2002, dtype=np.float64) ** -1.5
    n_pts = 400000
    wre = rng.normal(0.0, 0.4, n_pts)
    wim = rng.normal(0.0, 0.4, n_pts)
    # pair_bin is quadratic in its curve length; 4096 matches production use
    n_pair = 4096
    pre = rng.normal(0.0, 0.4, n_pair)
    pim = rng.normal(0.0, 0.4, n_pair)
    thetas = rng.random((100000, 6))
    rs = (np.array([2.0, 3.0, 5.0, 7.0, 11.0, 13.0])) ** -1.0
    ntt_n = 1 << 16
    poly = rng.integers(0, 998244353, ntt_n).astype(np.int64)
    return {
        "em_main_sums": (1.5, tgrid, 2.0, 10),
        "dirichlet_line": (tgrid, logn, amp),
        "bin2d": (wre, wim, -2.0, -2.0, 4.0 / 256, 256),
        "pair_bin": (pre, pim, pim, pre, -2.0, -2.0, 4.0 / 256, 256),
        "torus_g": (thetas, rs),
        "ntt": (poly, 998244353, 3, False),
    }


def _agreement(a, b) -> float:
    if isinstance(a, tuple):
        return max(_agreement(x, y) for x, y in zip(a, b))
    a = np.asarray(a)
    b = np.asarray(b)
    if a.dtype.kind in "iu":
        return float(np.abs(a - b).max())
    return float(np.abs(np.asarray(a) - np.asarray(b)).max())


def run(repeat: int = 3) -> list[dict]:
    rows = []
    loads = _workloads()
    for name, (fn_nb, fn_np) in kernel_variants().items():
        args = loads[name]
        out_np = fn_np(*args)
        row = {"kernel": name, "numpy_s": None, "numba_s": None, "max_diff": None}
        best = min(
            _timed(fn_np, args) for _ in range(repeat)
        )
        row["numpy_s"] = best
        if HAS_NUMBA:
            out_nb = fn_nb(*args)  # includes JIT compile; timed runs follow
            best_nb = min(_timed(fn_nb, args) for _ in range(repeat))
            row["numba_s"] = best_nb
            row["max_diff"] = _agreement(out_nb, out_np)
        rows.append(row)
    return rows


def _timed(fn, args) -> float:
    t0 = time.perf_counter()
    fn(*args)
    return time.perf_counter() - t0


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(prog="python -m mfunc.benchmark")
    parser.add_argument("--repeat", type=int, default=3)
    args = parser.parse_args(argv)
    rows = run(args.repeat)
    if not HAS_NUMBA:
        print("numba not importable: numpy twins only")
    print(f"{'kernel':<16}{'numpy':>10}{'numba':>10}{'speedup':>9}{'max diff':>11}")
    for r in rows:
        if r["numba_s"] is not None:
            speed = r["numpy_s"] / r["numba_s"]
            print(
                f"{r['kernel']:<16}{r['numpy_s']:>9.4f}s{r['numba_s']:>9.4f}s"
                f"{speed:>8.2f}x{r['max_diff']:>11.2e}"
            )
        else:
            print(f"{r['kernel']:<16}{r['numpy_s']:>9.4f}s{'-':>10}{'-':>9}{'-':>11}")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
