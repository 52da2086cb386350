"""Closed-form constants, saddle-point functions and contour geometry of the model."""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import ConfigurationError, DomainError


@dataclass(frozen=True)
class ModelParams:
    """Vertical clock rate ``a``, horizontal clock rate ``b`` and time ``t``."""

    a: float
    b: float
    t: float

    def __post_init__(self):
        for name in ("a", "b", "t"):
            v = getattr(self, name)
            if not (isinstance(v, (int, float)) and math.isfinite(v) and v > 0):
                raise ConfigurationError(f"{name} must be a positive finite number, got {v!r}")

    @property
    def q(self) -> float:
        """Probability of a north step, also the geometric ratio of the gaps."""
        return self.a / (self.a + self.b)

    @property
    def p_east(self) -> float:
        return self.b / (self.a + self.b)


@dataclass(frozen=True)
class ScalingConstants:
    lam: float
    d: float
    sigma: float


@dataclass(frozen=True)
class LargeTimeFunctions:
    theta: float
    kappa: float
    tau: float
    rho: float
    rho_tilde: float


def scaling_constants(params: ModelParams) -> ScalingConstants:
    a, b, t = params.a, params.b, params.t
    lam = np.cbrt(a * (a + b) / (2 * t))
    d = 3 * a * (a + b) / (2 * b * lam)
    sigma = np.cbrt(3 * a * (a + b) * lam / (2 * b**3))
    return ScalingConstants(float(lam), float(d), float(sigma))


def kappa(a, b, theta):
    th = np.asarray(theta, dtype=float)
    return (th**-2 - (a + th) ** -2) / ((a + th) ** -2 - (a + b + th) ** -2)


def tau(a, b, theta):
    th = np.asarray(theta, dtype=float)
    return a * (a + b) / (th**2 * (2 * a + b + 2 * th))


def tau_three_term(a, b, theta):
    th = np.asarray(theta, dtype=float)
    k = kappa(a, b, th)
    return 1 / (a + th) - 1 / th + k * (1 / (a + th) - 1 / (a + b + th))


def _kappa_prime(a, b, th):
    num = th**-2 - (a + th) ** -2
    den = (a + th) ** -2 - (a + b + th) ** -2
    dnum = -2 * th**-3 + 2 * (a + th) ** -3
    dden = -2 * (a + th) ** -3 + 2 * (a + b + th) ** -3
    return (dnum * den - num * dden) / den**2


def _tau_prime(a, b, th):
    # d/dθ of a(a+b) / (θ²(2a+b+2θ))
    g = th**2 * (2 * a + b + 2 * th)
    dg = 2 * th * (2 * a + b + 2 * th) + 2 * th**2
    return -a * (a + b) * dg / g**2


def large_time_functions(params: ModelParams, theta: float) -> LargeTimeFunctions:
    if not theta > 0:
        raise DomainError("theta must be positive")
    a, b = params.a, params.b
    th = float(theta)
    k = float(kappa(a, b, th))
    ta = float(tau(a, b, th))
    inner = th**-3 - (a + th) ** -3 + k * ((a + b + th) ** -3 - (a + th) ** -3)
    rho = float(np.cbrt(inner))
    rho_t = float(_kappa_prime(a, b, th) / _tau_prime(a, b, th) * rho)
    return LargeTimeFunctions(th, k, ta, rho, rho_t)


def _cbrt_pow(n, num):
    """n**(num/9) computed through nested cube roots so perfect powers stay exact."""
    r9 = np.cbrt(np.cbrt(float(n)))
    return r9**num


def theta_for(params: ModelParams, n: int) -> float:
    if n < 1:
        raise DomainError("n must be >= 1")
    return float(np.cbrt(n * params.a * (params.a + params.b) / (2 * params.t)))


def centering(params: ModelParams, n):
    """(a/b) n + d n^{2/3}."""
    c = scaling_constants(params)
    n = np.asarray(n, dtype=float)
    return params.a / params.b * n + c.d * np.cbrt(n) ** 2


def m_for(params: ModelParams, n: int, x: float) -> int:
    if n < 1:
        raise DomainError("n must be >= 1")
    c = scaling_constants(params)
    n23 = np.cbrt(float(n)) ** 2
    val = params.a / params.b * n + c.d * n23 + c.sigma * x * _cbrt_pow(n, 4)
    return int(math.floor(val))


def chi_from_height(params: ModelParams, n: int, h):
    """Rescaled fluctuation (h - (a/b)n - d n^{2/3}) / (σ n^{4/9}); vectorised in h."""
    if n < 1:
        raise DomainError("n must be >= 1")
    c = scaling_constants(params)
    h = np.asarray(h, dtype=float)
    out = (h - centering(params, n)) / (c.sigma * _cbrt_pow(n, 4))
    return out if out.ndim else float(out)


def clog1p(w):
    """Principal log(1 + w) for complex w, accurate for small |w| and near w = -1."""
    w = np.asarray(w, dtype=complex)
    x, y = w.real, w.imag
    small = np.abs(w) < 0.5
    with np.errstate(divide="ignore", invalid="ignore"):
        re_small = 0.5 * np.log1p(2 * x + x * x + y * y)
        re_big = np.log(np.hypot(1 + x, y))
    re = np.where(small, re_small, re_big)
    im = np.arctan2(y, 1 + x)
    return re + 1j * im


def h_tilde(a, b, n, m, v):
    """-n Log((a+v)/v) - m Log((a+v)/(a+b+v)) with principal logs of the ratios."""
    v = np.asarray(v, dtype=complex)
    out = np.zeros_like(v)
    if n:
        out = out - n * clog1p(a / v)
    if m:
        out = out - m * clog1p(-b / (a + b + v))
    return out


@dataclass(frozen=True)
class SaddleValues:
    f1: complex
    f1d1: complex
    f1d2: complex
    f1d3: complex
    f2: complex
    h_n: complex
    r_n: complex


class SaddleFunctions:
    """Evaluators for f1, f2, h_n and the remainder r_n at fixed (n, x)."""

    def __init__(self, params: ModelParams, n: int, x: float = 0.0, m: int | None = None):
        if n < 1:
            raise DomainError("n must be >= 1")
        self.params = params
        self.n = int(n)
        self.x = float(x)
        self.m = m_for(params, n, x) if m is None else int(m)
        self.const = scaling_constants(params)
        self.s = float(np.cbrt(float(n)))

    def _ab(self):
        p = self.params
        return p.a, p.b, p.t, self.const.d, self.const.sigma

    def f1(self, z):
        a, b, t, d, _ = self._ab()
        return t * z - a * (a + b) / (2 * z**2) + b * d / z

    def f1d1(self, z):
        a, b, t, d, _ = self._ab()
        return t + a * (a + b) / z**3 - b * d / z**2

    def f1d2(self, z):
        a, b, t, d, _ = self._ab()
        return -3 * a * (a + b) / z**4 + 2 * b * d / z**3

    def f1d3(self, z):
        a, b, t, d, _ = self._ab()
        return 12 * a * (a + b) / z**5 - 6 * b * d / z**4

    def f2(self, z):
        a, b, t, d, sigma = self._ab()
        return b * sigma * self.x / z

    def _check(self, z):
        a, b = self.params.a, self.params.b
        zz = np.atleast_1d(np.asarray(z, dtype=complex))
        for pole in (0.0, -a / self.s, -(a + b) / self.s):
            if np.any(np.abs(zz - pole) < 1e-300 + 1e-15 * max(1.0, abs(pole))):
                raise DomainError(f"z hits a pole or branch point of h_n at {pole}")

    def h_n(self, z):
        self._check(z)
        a, b = self.params.a, self.params.b
        return h_tilde(a, b, self.n, self.m, self.s * np.asarray(z, dtype=complex))

    def r_n(self, z):
        a, b, t, d, sigma = self._ab()
        z = np.asarray(z, dtype=complex)
        n19 = np.cbrt(self.s)
        return (self.h_n(z) + self.s * (a * (a + b) / (2 * z**2) - b * d / z)
                - n19 * b * sigma * self.x / z)


def saddle_eval(fns: SaddleFunctions, z: complex) -> SaddleValues:
    z = complex(z)
    return SaddleValues(
        complex(fns.f1(z)), complex(fns.f1d1(z)), complex(fns.f1d2(z)), complex(fns.f1d3(z)),
        complex(fns.f2(z)), complex(fns.h_n(z)), complex(fns.r_n(z)),
    )


def steep_descent_check(params: ModelParams, y_grid, step: float = 1e-5):
    """Compare d/dy Re f1(λ+iy) with -4a(a+b)y³/(λ²+y²)³ by centred differences."""
    a, b = params.a, params.b
    lam = scaling_constants(params).lam
    fns = SaddleFunctions(params, 1, 0.0)
    rows = []
    for y in y_grid:
        y = float(y)
        if y == 0:
            raise DomainError("y must be nonzero")
        analytic = -4 * a * (a + b) * y**3 / (lam**2 + y**2) ** 3
        h = step * max(1.0, abs(y))
        numeric = (fns.f1(complex(lam, y + h)).real - fns.f1(complex(lam, y - h)).real) / (2 * h)
        rows.append((y, analytic, numeric))
    return rows


def p_level(params: ModelParams) -> float:
    """Height p at which Re f1(±ip) equals Re f1(λ)."""
    return math.sqrt(np.cbrt(params.a * (params.a + params.b) / (2 * params.t)) ** 2 / 3)


def series_bound_check(C: float, m_max: int):
    """Partial sum of C^m m^{1+m/2}/m! against 16 C^4 e^{2C^2}, both in log space.

    Returns ``(log_partial_sum, log_bound)``; raises if the bound is violated.
    """
    if not C > 1:
        raise DomainError("C must exceed 1")
    m = np.arange(1, int(m_max) + 1, dtype=float)
    from scipy.special import gammaln

    logs = m * math.log(C) + (1 + m / 2) * np.log(m) - gammaln(m + 1)
    top = logs.max()
    log_sum = float(top + math.log(np.exp(logs - top).sum()))
    log_bound = math.log(16) + 4 * math.log(C) + 2 * C * C
    if log_sum > log_bound:
        raise AssertionError(f"bound violated: {log_sum} > {log_bound}")
    return log_sum, log_bound
