"""Command line interface.

Exit codes: 0 success or suite pass, 2 statistical suite failure, 1 error.
"""
from __future__ import annotations

import argparse
import json
import logging
import sys

import numpy as np

from . import exact, fpp, harness, pushtasep, scaling, tracy_widom
from .errors import ConfigurationError
from .rng import Streams

EXIT_OK, EXIT_ERROR, EXIT_FAIL = 0, 1, 2


def _parse_list(spec: str):
    """'1,2,5' or 'lo:hi' (inclusive) or 'lo:hi:step' into a list of ints."""
    out = []
    for part in str(spec).split(","):
        if ":" in part:
            bits = [int(v) for v in part.split(":")]
            lo, hi = bits[0], bits[1]
            step = bits[2] if len(bits) > 2 else 1
            out.extend(range(lo, hi + 1, step))
        elif part:
            out.append(int(part))
    return out


def _grid(spec: str):
    lo, hi, step = (float(v) for v in spec.split(":"))
    k = int(round((hi - lo) / step))
    return [lo + i * step for i in range(k + 1)]


def _global(p: argparse.ArgumentParser, suppress: bool):
    d = argparse.SUPPRESS if suppress else None
    p.add_argument("--config", default=d, help="JSON experiment config")
    p.add_argument("--seed", type=int, default=d)
    p.add_argument("--threads", type=int, default=d, help="thread budget (overrides BEFPP_THREADS)")
    p.add_argument("--out", default=d, help="output CSV path ('-' for stdout)")


def _model(p):
    p.add_argument("--a", type=float, default=None)
    p.add_argument("--b", type=float, default=None)
    p.add_argument("--t", type=float, default=None)


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="befpp", description="Bernoulli-exponential FPP toolkit")
    _global(ap, False)
    ap.add_argument("-v", "--verbose", action="store_true")
    sub = ap.add_subparsers(dest="cmd", required=True)

    def add(parent, name, **kw):
        sp = parent.add_parser(name, **kw)
        _global(sp, True)
        return sp

    sp = add(sub, "constants", help="print scaling constants")
    _model(sp)
    sp.add_argument("--theta", type=float)
    sp.add_argument("--n", type=int)
    sp.add_argument("--x", type=float, default=0.0)

    sim = sub.add_parser("simulate", help="Monte Carlo samplers").add_subparsers(dest="what", required=True)
    sp = add(sim, "fpp")
    _model(sp)
    sp.add_argument("--n", type=int, required=True)
    sp.add_argument("--reps", type=int, default=1000)
    sp.add_argument("--method", choices=["event", "dp"], default="dp")

    sp = add(sim, "pushtasep")
    _model(sp)
    sp.add_argument("--n", type=int, required=True)
    sp.add_argument("--reps", type=int, default=1000)
    sp.add_argument("--offset", type=int, choices=[0, 1], default=1)
    sp.add_argument("--variant", choices=["geom", "push", "continuous"], default="geom")
    sp.add_argument("--lambda", dest="lam", type=float, default=1.0)

    sp = add(sub, "cluster-snapshot", help="cluster vertices with insertion times")
    _model(sp)
    sp.add_argument("--size", type=int, required=True)

    sp = add(sub, "exact", help="exact law P(H_t(n) < m)")
    _model(sp)
    sp.add_argument("--n", type=int, required=True)
    sp.add_argument("--m", type=str, default=None, help="list such as 5 or 1,2,3 or 1:30")
    sp.add_argument("--x", type=float, default=None)
    sp.add_argument("--preset", choices=["small-circle", "saddle"], default=None,
                    help="default: saddle for n >= 1, small-circle for n = 0")
    sp.add_argument("--nodes", type=int, default=16)

    sp = add(sub, "tw", help="GUE Tracy-Widom distribution")
    sp.add_argument("--x", type=float)
    sp.add_argument("--grid", type=str, help="lo:hi:step (write --grid=-4:2:0.5 for a negative lo)")
    sp.add_argument("--method", choices=["airy", "contour"], default="airy")

    cmp_ = sub.add_parser("compare", help="statistical suites").add_subparsers(dest="what", required=True)
    for name in ("tw-fit", "equivalence", "exact-mc"):
        sp = add(cmp_, name)
        _model(sp)
        sp.add_argument("--n", type=str, default=None, help="n list, e.g. 10,50")
        sp.add_argument("--reps", type=int, default=None)
        if name == "tw-fit":
            sp.add_argument("--method", choices=["event", "dp", "pushtasep"], default=None)
    return ap


def _config(args, **extra) -> harness.ExperimentConfig:
    d = {}
    if getattr(args, "config", None):
        with open(args.config) as fh:
            d.update(json.load(fh))
    for key in ("a", "b", "t", "seed", "threads", "out", "reps", "method"):
        v = getattr(args, key, None)
        if v is not None:
            d[key] = v
    if getattr(args, "n", None) is not None and isinstance(args.n, str):
        d["n_list"] = _parse_list(args.n)
    d.update({k: v for k, v in extra.items() if v is not None})
    return harness.ExperimentConfig.from_dict(d)


def _params(args):
    cfg = _config(args) if getattr(args, "config", None) else None
    a = args.a if args.a is not None else (cfg.a if cfg else 1.0)
    b = args.b if args.b is not None else (cfg.b if cfg else 1.0)
    t = args.t if args.t is not None else (cfg.t if cfg else 1.0)
    return scaling.ModelParams(a, b, t)


def _seed(args):
    if getattr(args, "seed", None) is not None:
        return args.seed
    if getattr(args, "config", None):
        return _config(args).seed
    return 0


def cmd_constants(args):
    p = _params(args)
    c = scaling.scaling_constants(p)
    vals = {"lambda": c.lam, "d": c.d, "sigma": c.sigma}
    theta = args.theta
    if theta is None and args.n is not None:
        theta = scaling.theta_for(p, args.n)
    if theta is not None:
        lt = scaling.large_time_functions(p, theta)
        vals.update(theta=lt.theta, kappa=lt.kappa, tau=lt.tau, rho=lt.rho, rho_tilde=lt.rho_tilde)
    if args.n is not None:
        vals["m"] = scaling.m_for(p, args.n, args.x)
    for k, v in vals.items():
        print(f"{k}={v}" if isinstance(v, int) else f"{k}={v:.15g}")
    return EXIT_OK


def cmd_simulate_fpp(args):
    p = _params(args)
    h = fpp.simulate_heights(p, args.n, args.reps, _seed(args), args.method, threads=args.threads)
    chi = scaling.chi_from_height(p, args.n, h) if args.n >= 1 else np.full(len(h), np.nan)
    rows = [(r, args.n, int(h[r]), float(chi[r])) for r in range(len(h))]
    harness.write_csv(args.out, ["replica", "n", "height", "chi"], rows)
    return EXIT_OK


def cmd_simulate_push(args):
    p = _params(args)
    idx = args.n + args.offset
    if idx < 1:
        raise ConfigurationError("n + offset must be >= 1")
    pos = pushtasep.simulate_positions(p, idx, args.reps, _seed(args), threads=args.threads,
                                       variant=args.variant, lambda_rate=args.lam)
    height = pos - idx
    if args.variant == "geom" and args.n >= 1:
        chi = scaling.chi_from_height(p, args.n, height)
    else:
        chi = np.full(len(pos), np.nan)
    rows = []
    for r in range(len(pos)):
        val = int(pos[r]) if args.variant != "continuous" else float(pos[r])
        he = int(height[r]) if args.variant != "continuous" else float(height[r])
        rows.append((r, args.n, val, he, float(chi[r])))
    harness.write_csv(args.out, ["replica", "n", "position", "height_equiv", "chi"], rows)
    return EXIT_OK


def cmd_snapshot(args):
    p = _params(args)
    pts = fpp.cluster_snapshot(p, args.size, p.t, Streams(_seed(args), 0))
    harness.write_csv(args.out, ["x", "y", "time"], pts)
    return EXIT_OK


def cmd_exact(args):
    p = _params(args)
    if args.m is not None:
        ms = _parse_list(args.m)
    elif args.x is not None:
        ms = [scaling.m_for(p, args.n, args.x)]
    else:
        raise ConfigurationError("give --m or --x")
    preset = args.preset or ("saddle" if args.n >= 1 else "small-circle")
    rows = []
    for m in ms:
        r = exact.prob_height_below(exact.ExactLawRequest(p, args.n, m, preset, nodes=args.nodes))
        rows.append((args.n, m, r.p, r.imag_residual, r.doubling_error))
    harness.write_csv(args.out, ["n", "m", "p", "imag_residual", "doubling_error"], rows)
    return EXIT_OK


def cmd_tw(args):
    if args.grid:
        xs = _grid(args.grid)
    elif args.x is not None:
        xs = [args.x]
    else:
        raise ConfigurationError("give --x or --grid")
    rows = []
    for x in xs:
        r = tracy_widom.F_gue(tracy_widom.TWRequest(x, args.method))
        rows.append((x, r.F, r.doubling_error))
    if args.grid or args.out:
        harness.write_csv(args.out, ["x", "F", "doubling_error"], rows)
    else:
        print(f"F={rows[0][1]:.15g} doubling_error={rows[0][2]:.3g}")
    return EXIT_OK


def cmd_compare(args):
    cfg = _config(args)
    if args.what == "tw-fit":
        rows = harness.tw_convergence_study(cfg)
        harness.write_csv(cfg.out, ["n", "reps", "ks", "mean_chi", "sd_chi"], rows)
        if not rows:
            return EXIT_OK
        ok = harness.tw_trend_pass(rows, cfg.ks_max)
    elif args.what == "equivalence":
        rows = harness.law_equivalence_suite(cfg)
        harness.write_csv(cfg.out, ["n", "pair", "ks", "critical", "pass"], rows)
        ok = all(r["pass"] for r in rows)
    else:
        rows = harness.exact_vs_mc_suite(cfg)
        harness.write_csv(cfg.out, ["n", "m", "p_exact", "p_mc", "se_mc", "z_score", "pass"], rows)
        ok = all(r["pass"] for r in rows)
    print(f"suite {args.what}: {'PASS' if ok else 'FAIL'}", file=sys.stderr)
    return EXIT_OK if ok else EXIT_FAIL


def main(argv=None) -> int:
    ap = build_parser()
    args = ap.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING)
    handlers = {
        "constants": cmd_constants,
        "cluster-snapshot": cmd_snapshot,
        "exact": cmd_exact,
        "tw": cmd_tw,
        "compare": cmd_compare,
    }
    try:
        if args.cmd == "simulate":
            return cmd_simulate_fpp(args) if args.what == "fpp" else cmd_simulate_push(args)
        return handlers[args.cmd](args)
    except Exception as exc:  # reported, not raised, so scripts see exit code 1
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
