"""Seeded experiments, suites and CSV output."""
from __future__ import annotations

import csv
import dataclasses
import io
import json
import logging
import math
from dataclasses import dataclass, field

import numpy as np

from . import exact, fpp
from .errors import ConfigurationError
from .scaling import ModelParams, chi_from_height
from .stats import EmpiricalDistribution, binomial_se, ks_critical, ks_one_sample, ks_two_sample

log = logging.getLogger(__name__)

METHODS = ("event", "dp", "pushtasep")


@dataclass
class ExperimentConfig:
    a: float = 1.0
    b: float = 1.0
    t: float = 1.0
    n_list: list = field(default_factory=lambda: [10])
    reps: int = 1000
    seed: int = 0
    method: str = "pushtasep"
    methods: list = field(default_factory=lambda: list(METHODS))
    offset: int = 1
    threads: int | None = None
    out: str | None = None
    alpha: float = 0.01
    ks_max: float = 0.05
    z_max: float = 4.0
    coverage: float = 0.90
    preset: str = "saddle"

    @property
    def params(self) -> ModelParams:
        return ModelParams(float(self.a), float(self.b), float(self.t))

    def validate(self):
        self.params
        if self.reps < 0:
            raise ConfigurationError("reps must be >= 0")
        if any(int(n) < 0 for n in self.n_list):
            raise ConfigurationError("n values must be >= 0")
        if not 0 <= self.seed < 2**64:
            raise ConfigurationError("seed must be a 64-bit unsigned integer")
        return self

    @classmethod
    def from_dict(cls, d: dict) -> "ExperimentConfig":
        names = {f.name for f in dataclasses.fields(cls)}
        unknown = set(d) - names
        if unknown:
            raise ConfigurationError(f"unknown config keys: {sorted(unknown)}")
        return cls(**d).validate()

    @classmethod
    def from_json(cls, path: str, **overrides) -> "ExperimentConfig":
        with open(path) as fh:
            d = json.load(fh)
        d.update({k: v for k, v in overrides.items() if v is not None})
        return cls.from_dict(d)


def fmt(v) -> str:
    """Deterministic text form for CSV cells."""
    if isinstance(v, (bool, np.bool_)):
        return "true" if v else "false"
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    if isinstance(v, (float, np.floating)):
        v = float(v)
        if math.isnan(v):
            return "nan"
        return repr(v)
    return str(v)


def csv_text(header, rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for r in rows:
        cells = [r[h] for h in header] if isinstance(r, dict) else r
        w.writerow([fmt(x) for x in cells])
    return buf.getvalue()


def write_csv(path, header, rows):
    text = csv_text(header, rows)
    if path in (None, "-"):
        print(text, end="")
    else:
        with open(path, "w", newline="") as fh:
            fh.write(text)
    return text


def sample_heights(cfg: ExperimentConfig, n: int, method: str, prefix: str = "") -> np.ndarray:
    return fpp.simulate_heights(cfg.params, int(n), int(cfg.reps), int(cfg.seed), method,
                                threads=cfg.threads, prefix=prefix, offset=cfg.offset)


def tw_convergence_study(cfg: ExperimentConfig):
    """Rows {n, reps, ks, mean_chi, sd_chi}: KS of rescaled heights against F_GUE."""
    from .tracy_widom import gue_cdf

    if cfg.reps == 0:
        log.warning("reps=0: nothing to simulate")
        return []
    cdf = gue_cdf()
    rows = []
    for n in cfg.n_list:
        if n < 1:
            raise ConfigurationError("the Tracy-Widom study needs n >= 1")
        h = sample_heights(cfg, n, cfg.method)
        emp = EmpiricalDistribution(chi_from_height(cfg.params, n, h))
        rows.append({"n": int(n), "reps": int(cfg.reps), "ks": ks_one_sample(emp, cdf),
                     "mean_chi": emp.mean(), "sd_chi": emp.sd()})
    return rows


def tw_trend_pass(rows, ks_max: float) -> bool:
    ks = [r["ks"] for r in rows]
    return bool(ks) and all(x > y for x, y in zip(ks[:-1], ks[1:])) and ks[-1] < ks_max


def law_equivalence_suite(cfg: ExperimentConfig, coupled: bool = False):
    """Pairwise two-sample KS between samplers at every n.

    Each method gets its own stream prefix unless ``coupled`` is set.
    """
    rows = []
    for n in cfg.n_list:
        samples = [(m, sample_heights(cfg, n, m, "" if coupled else m + "/")) for m in cfg.methods]
        for i in range(len(samples)):
            for j in range(i + 1, len(samples)):
                e1 = EmpiricalDistribution(samples[i][1])
                e2 = EmpiricalDistribution(samples[j][1])
                ks = ks_two_sample(e1, e2)
                crit = ks_critical(cfg.alpha, len(e1), len(e2))
                rows.append({"n": int(n), "pair": f"{samples[i][0]}-{samples[j][0]}", "ks": ks,
                             "critical": crit, "pass": ks < crit})
    return rows


def column0_suite(cfg: ExperimentConfig, m_max: int = 10):
    """Empirical P(H_t(0) >= m) per method against the binomial-gamma closed form."""
    rows = []
    for method in ("event", "dp"):
        h = sample_heights(cfg, 0, method, method + "/")
        for m in range(1, m_max + 1):
            exact_p = fpp.column0_survival(cfg.params, m)
            emp = float(np.mean(h >= m))
            se = binomial_se(exact_p, len(h))
            z = (emp - exact_p) / se if se > 0 else 0.0
            rows.append({"method": method, "m": m, "p_exact": exact_p, "p_mc": emp, "se_mc": se,
                         "z_score": z, "pass": abs(z) <= cfg.z_max})
    return rows


def exact_vs_mc_suite(cfg: ExperimentConfig, method: str = "dp", ms=None):
    """Rows {n, m, p_exact, p_mc, se_mc, z_score, pass} over the central part of the law.

    The m values are those with empirical P(H < m) inside the central
    ``coverage`` band, plus m = 1; ``ms`` overrides the selection.
    """
    rows = []
    lo = (1 - cfg.coverage) / 2
    for n in cfg.n_list:
        h = sample_heights(cfg, n, method)
        if ms is None:
            qs = np.quantile(h, [lo, 1 - lo])
            sel = sorted(set(range(int(qs[0]), int(qs[1]) + 2)) | {1})
        else:
            sel = list(ms)
        for m in sel:
            if m <= 0:
                rows.append({"n": int(n), "m": int(m), "p_exact": 0.0, "p_mc": float(np.mean(h < m)),
                             "se_mc": 0.0, "z_score": 0.0, "pass": bool(np.mean(h < m) == 0.0)})
                continue
            res = exact.prob_height_below(exact.ExactLawRequest(cfg.params, int(n), int(m), cfg.preset))
            p_mc = float(np.mean(h < m))
            se = binomial_se(p_mc, len(h))
            if se == 0:
                se = binomial_se(res.p, len(h))
            z = (res.p - p_mc) / se if se > 0 else 0.0
            rows.append({"n": int(n), "m": int(m), "p_exact": res.p, "p_mc": p_mc, "se_mc": se,
                         "z_score": z, "pass": abs(z) <= cfg.z_max})
    return rows
