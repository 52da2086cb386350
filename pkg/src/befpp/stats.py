"""Empirical distributions and Kolmogorov-Smirnov statistics."""
from __future__ import annotations

import math

import numpy as np

from .errors import DomainError


class EmpiricalDistribution:
    def __init__(self, samples):
        x = np.sort(np.asarray(samples, dtype=float).ravel())
        if x.size == 0:
            raise DomainError("empirical distribution needs at least one sample")
        self.x = x

    def __len__(self):
        return self.x.size

    def ecdf(self, t):
        """Right-continuous ECDF at ``t``."""
        return np.searchsorted(self.x, np.asarray(t, dtype=float), side="right") / self.x.size

    def mean(self):
        return float(self.x.mean())

    def sd(self):
        return float(self.x.std(ddof=1)) if self.x.size > 1 else 0.0


def ks_one_sample(emp: EmpiricalDistribution, cdf) -> float:
    """sup |F_N - F| for a continuous ``cdf``; ties are handled through both one-sided gaps."""
    x = emp.x
    n = x.size
    f = np.asarray(cdf(x), dtype=float)
    upper = np.searchsorted(x, x, side="right") / n  # ECDF at x
    lower = np.searchsorted(x, x, side="left") / n  # ECDF just below x
    return float(max(np.max(upper - f), np.max(f - lower), 0.0))


def ks_two_sample(e1: EmpiricalDistribution, e2: EmpiricalDistribution) -> float:
    grid = np.union1d(e1.x, e2.x)
    return float(np.max(np.abs(e1.ecdf(grid) - e2.ecdf(grid))))


def ks_critical(alpha: float, n1: int, n2: int | None = None) -> float:
    """Asymptotic KS critical value, one-sample if ``n2`` is None."""
    c = math.sqrt(-0.5 * math.log(alpha / 2))
    if n2 is None:
        return c / math.sqrt(n1)
    return c * math.sqrt((n1 + n2) / (n1 * n2))


def binomial_se(p: float, n: int) -> float:
    return math.sqrt(max(p * (1 - p), 0.0) / n)
