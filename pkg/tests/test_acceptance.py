"""Acceptance criteria 1-9, each reported as one PASS/FAIL line.

Run alone with ``pytest -v tests/test_acceptance.py``; criterion 4 takes
tens of minutes on one core.
"""
import math
import os
import subprocess
import sys

import numpy as np
import pytest

from befpp import exact, harness, quad, scaling, tracy_widom as tw
from befpp.exact import ExactLawRequest
from befpp.scaling import ModelParams, SaddleFunctions

from conftest import record

P1 = ModelParams(1.0, 1.0, 1.0)
THREADS = os.cpu_count() or 1


def verdict(num, title, ok, detail):
    record(f"criterion {num}: {'PASS' if ok else 'FAIL'}  {title}  [{detail}]")
    assert ok, detail


def test_criterion_1_exact_vs_mc():
    cfg = harness.ExperimentConfig(n_list=list(range(1, 9)), reps=10**6, seed=101, coverage=0.90,
                                   z_max=4.0, threads=THREADS)
    rows = harness.exact_vs_mc_suite(cfg, method="dp")
    worst = max(abs(r["z_score"]) for r in rows)
    ok = all(r["pass"] for r in rows)
    verdict(1, "exact law vs MC(1e6), n=1..8, central 90%, |z|<=4", ok,
            f"{len(rows)} cells, max |z| = {worst:.2f}")


def test_criterion_2_three_way_equivalence():
    cfg = harness.ExperimentConfig(n_list=[10, 50], reps=10**5, seed=202, alpha=0.01, threads=THREADS)
    rows = harness.law_equivalence_suite(cfg)
    ok = len(rows) == 6 and all(r["pass"] for r in rows)
    detail = ", ".join(f"n={r['n']} {r['pair']} {r['ks']:.4f}/{r['critical']:.4f}" for r in rows)
    verdict(2, "event/dp/pushtasep two-sample KS below 1% critical", ok, detail)


def test_criterion_3_column0_oracle():
    cfg = harness.ExperimentConfig(reps=10**6, seed=303, z_max=4.0, threads=THREADS)
    rows = harness.column0_suite(cfg, m_max=10)
    worst = max(abs(r["z_score"]) for r in rows)
    verdict(3, "column-0 Binomial-Gamma oracle, m=1..10, within 4 SE", all(r["pass"] for r in rows),
            f"{len(rows)} cells, max |z| = {worst:.2f}")


@pytest.mark.slow
def test_criterion_4_tw_trend():
    cfg = harness.ExperimentConfig(n_list=[10**3, 10**4, 10**5], reps=10**4, seed=404, method="pushtasep",
                                   ks_max=0.05, threads=THREADS)
    rows = harness.tw_convergence_study(cfg)
    ks = [r["ks"] for r in rows]
    decreasing = all(x > y for x, y in zip(ks, ks[1:]))
    below = ks[-1] < cfg.ks_max
    detail = (", ".join(f"n={r['n']} KS={r['ks']:.4f} mean={r['mean_chi']:.3f} sd={r['sd_chi']:.3f}" for r in rows)
              + f"; strictly decreasing={decreasing}; KS(1e5)<0.05={below}")
    verdict(4, "Tracy-Widom trend over n=1e3,1e4,1e5 and KS(1e5)<0.05", decreasing and below, detail)


def test_criterion_5_constants_and_identities():
    rng = np.random.default_rng(505)
    worst = 0.0
    for _ in range(100):
        a, b, t = rng.uniform(0.1, 5.0, 3)
        p = ModelParams(a, b, t)
        c = scaling.scaling_constants(p)
        f = SaddleFunctions(p, 1)
        lam = c.lam
        third = f.f1d3(lam)
        rels = [abs(f.f1d1(lam)) / t, abs(f.f1d2(lam)) * lam / abs(third),
                abs(third - 3 * a * (a + b) / lam**5) / abs(third),
                abs(third - 2 * (b * c.sigma / lam**2) ** 3) / abs(third)]
        worst = max(worst, *rels)
    ns = [10 * 10**k for k in range(6)]
    ks = [abs(scaling.tau(1.0, 1.0, scaling.theta_for(P1, n)) * n - P1.t) * np.cbrt(n) for n in ns]
    # the scaled gap K_n rises to t(2a+b)/2 / (a(a+b)/2t)^{1/3}; stability means a Cauchy sequence below that limit
    k_inf = P1.t * (2 * P1.a + P1.b) / 2 / np.cbrt(P1.a * (P1.a + P1.b) / (2 * P1.t))
    steps = np.abs(np.diff(ks))
    stable = all(k <= k_inf for k in ks) and all(x > y for x, y in zip(steps, steps[1:])) \
        and abs(ks[-1] - ks[-2]) / ks[-1] < 0.05
    ok = worst <= 1e-12 and stable
    verdict(5, "saddle identities (100 draws, 1e-12) and tau*n - t = O(n^-1/3)", ok,
            f"max rel err {worst:.2e}; K_n = {', '.join(f'{k:.4f}' for k in ks)} -> K = {k_inf:.4f}")


def _airy_series(s, terms=60):
    c1 = 3 ** (-2 / 3) / math.gamma(2 / 3)
    c2 = 3 ** (-1 / 3) / math.gamma(1 / 3)
    f = fk = 1.0
    g = gk = s
    for k in range(1, terms):
        fk *= s**3 / ((3 * k - 1) * (3 * k))
        gk *= s**3 / ((3 * k) * (3 * k + 1))
        f += fk
        g += gk
    return c1 * f - c2 * g


def test_criterion_6_tracy_widom_consistency():
    diffs = [tw.ab_ba_check(x)["diff"] for x in (-2.0, 0.0, 3.0)]
    conv = max(tw.F_gue(tw.TWRequest(x)).doubling_error for x in np.arange(-8.0, 4.01, 0.25))
    ai0 = abs(tw.airy_ai(0.0) - _airy_series(0.0))
    h = 1e-2
    ode = 0.0
    for s in np.linspace(-5, 5, 41):
        f = tw.airy_ai(np.array([s - 2 * h, s - h, s, s + h, s + 2 * h]))
        d2 = (-f[0] + 16 * f[1] - 30 * f[2] + 16 * f[3] - f[4]) / (12 * h * h)
        ode = max(ode, abs(d2 - s * f[2]))
    ok = max(diffs) < 1e-6 and conv < 1e-8 and ai0 < 1e-9 and ode < 1e-6
    verdict(6, "airy vs contour F_GUE, grid self-convergence, Ai(0), Airy ODE", ok,
            f"max method diff {max(diffs):.1e}; max |F(N)-F(2N)| {conv:.1e}; Ai(0) err {ai0:.1e}; ODE {ode:.1e}")


def test_criterion_7_numerics_invariances():
    swap, imag, rebal = 0.0, 0.0, 0.0
    monotone = True
    rng = np.random.default_rng(707)
    for n in range(1, 9):
        ps = []
        for m in range(1, int(2 * n + 12)):
            a = exact.prob_height_below(ExactLawRequest(P1, n, m, "saddle"))
            ps.append(a.p)
            imag = max(imag, a.imag_residual)
            if m % 3 == 0:
                b = exact.prob_height_below(ExactLawRequest(P1, n, m, "small-circle"))
                swap = max(swap, abs(a.p - b.p))
                imag = max(imag, b.imag_residual)
        monotone &= all(x <= y + 1e-12 for x, y in zip(ps, ps[1:]))
        req = ExactLawRequest(P1, n, n + 4)
        base, _, _ = exact._det_once(req, 32)
        u, _ = exact.build_contours(req)
        ug = quad.discretize(u, exact._u_counts(u, 32), exact._balance(P1, n, n + 4))
        val, _, _ = exact._det_once(req, 32, ug.balance + rng.normal(scale=2.0, size=len(ug)))
        rebal = max(rebal, abs(val - base) / abs(base))
    ok = swap <= 1e-8 and rebal <= 1e-10 and imag < 1e-8 and monotone
    verdict(7, "preset swap, re-balancing, imaginary residual, monotone p(m)", ok,
            f"swap {swap:.1e}; rebalance rel {rebal:.1e}; imag {imag:.1e}; monotone {monotone}")


def test_criterion_8_series_bound():
    rows = []
    ok = True
    for C in (2.0, 5.0, 10.0):
        try:
            s, bnd = scaling.series_bound_check(C, 20 * int(C * C) + 200)
            rows.append(f"C={C:g}: log sum {s:.3f} <= log bound {bnd:.3f}")
        except AssertionError as exc:
            ok = False
            rows.append(f"C={C:g}: {exc}")
    verdict(8, "partial sums below 16 C^4 exp(2 C^2)", ok, "; ".join(rows))


def _cli(args, out, threads):
    cmd = [sys.executable, "-m", "befpp.cli", "--threads", str(threads), "--out", str(out)] + args
    return subprocess.run(cmd, capture_output=True, text=True).returncode


def test_criterion_9_determinism(tmp_path):
    suites = {
        "simulate-fpp": ["simulate", "fpp", "--n", "12", "--reps", "5000", "--method", "event", "--seed", "9"],
        "simulate-push": ["simulate", "pushtasep", "--n", "40", "--reps", "5000", "--seed", "9"],
        "snapshot": ["cluster-snapshot", "--size", "20", "--seed", "9"],
        "exact": ["exact", "--n", "3", "--m", "1:8"],
        "tw": ["tw", "--grid=-3:2:0.5"],
        "tw-fit": ["compare", "tw-fit", "--n", "20,40", "--reps", "5000", "--seed", "9"],
        "equivalence": ["compare", "equivalence", "--n", "8", "--reps", "5000", "--seed", "9"],
        "exact-mc": ["compare", "exact-mc", "--n", "2", "--reps", "20000", "--seed", "9"],
    }
    bad = []
    for name, args in suites.items():
        outs, codes = [], []
        for threads, tag in ((1, "a"), (1, "b"), (4, "c")):
            p = tmp_path / f"{name}-{tag}.csv"
            codes.append(_cli(args, p, threads))
            outs.append(p.read_bytes() if p.exists() else b"")
        if not outs[0] or len(set(outs)) != 1 or len(set(codes)) != 1 or codes[0] == 1:
            bad.append(name)
    verdict(9, "byte-identical CSVs across re-runs and thread budgets 1/4", not bad,
            f"{len(suites)} suites checked" + (f"; differing: {bad}" if bad else ""))
