"""Compiled core against the pure-Python kernels on the hot paths.

Run: python3 benchmarks/bench_kernels.py [--reps N]
Both backends receive identical stream heads, so the outputs are also compared.
"""
import argparse
import time

import numpy as np

from befpp import kernels, pushtasep
from befpp.fpp import LABELS as FPP_LABELS, initial_row_cap
from befpp.rng import stream_head
from befpp.scaling import ModelParams


def _time(fn, repeat=3):
    best = np.inf
    out = None
    for _ in range(repeat):
        t0 = time.perf_counter()
        out = fn()
        best = min(best, time.perf_counter() - t0)
    return best, out


def cases(p, reps):
    fh = [stream_head(1, lab) for lab in FPP_LABELS]
    ph = [stream_head(1, lab) for lab in pushtasep.LABELS]
    logq = np.log(p.q)
    for n in (8, 50):
        cap = initial_row_cap(p, n)
        yield f"fpp event n={n}", lambda be, n=n: be.fpp_batch("event", p.a, p.b, p.t, n, n, fh, 0, reps, 10**9)[0]
        yield f"fpp dp n={n}", lambda be, n=n, cap=cap: be.fpp_batch("dp", p.a, p.b, p.t, n, n, fh, 0, reps, cap)[0]
    for n in (50, 1000):
        yield f"pushtasep n={n}", lambda be, n=n: be.push_batch(pushtasep.GEOM, logq, p.a, p.t, n, ph, 0, reps)


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--reps", type=int, default=200)
    args = ap.parse_args(argv)
    if kernels.compiled_backend is None:
        print("compiled core not available; build with pip install -e . --no-build-isolation")
        return 1
    p = ModelParams(1.0, 1.0, 1.0)
    print(f"{'kernel':<22}{'python s':>12}{'compiled s':>12}{'speedup':>10}  match")
    for name, fn in cases(p, args.reps):
        tp, op = _time(lambda: fn(kernels.python_backend), repeat=1)
        tc, oc = _time(lambda: fn(kernels.compiled_backend))
        same = np.array_equal(np.asarray(op), np.asarray(oc))
        print(f"{name:<22}{tp:>12.4f}{tc:>12.5f}{tp / tc:>10.1f}  {same}")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
