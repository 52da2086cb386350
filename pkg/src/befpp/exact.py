"""Exact finite-n law P(H_t(n) < m) = det(I - K_n) by Nyström quadrature.

The kernel is written as

    K(u, u') = (1/2πi) ∫ e^{Φ(z) - Φ(u)} (z/u) dz / ((z - u)(z - u')),
    Φ(v) = t v + h̃(v),  h̃(v) = -n Log((a+v)/v) - m Log((a+v)/(a+b+v)),

with z on a wedge (vertical segment capped by rays at ±2π/3) and u on a closed
contour around 0 that excludes -(a+b).  e^{h̃} is rational, so the principal
logs of the ratios give a single-valued exponent on every contour used here.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import quad
from .errors import AccuracyError, ConfigurationError, NumericRangeError
from .scaling import ModelParams, h_tilde, m_for, scaling_constants

CIRCLE_MAX_ENTRY = 1e6


@dataclass(frozen=True)
class ExactLawRequest:
    params: ModelParams
    n: int
    m: int
    preset: str = "saddle"
    nodes: int = 16
    tail_tol: float = 1e-17
    doubling_tol: float = 1e-8
    imag_tol: float = 1e-8
    max_nodes: int = 1024
    delta: float | None = None


@dataclass
class ExactLawResult:
    p: float
    imag_residual: float
    doubling_error: float
    nodes: int
    diagnostics: dict = field(default_factory=dict)


def phi(params: ModelParams, n: int, m: int, v):
    return params.t * np.asarray(v, dtype=complex) + h_tilde(params.a, params.b, n, m, v)


def _saddle_scale(params: ModelParams, n: int) -> float:
    return float(np.cbrt(float(n))) * scaling_constants(params).lam


def _graded_segment(z0: complex, z1: complex, first: float):
    """Split [z0, z1] into panels doubling in length away from z0."""
    length = abs(z1 - z0)
    cuts = [0.0]
    step = min(first, length)
    while cuts[-1] + step < length * (1 - 1e-12):
        cuts.append(cuts[-1] + step)
        step *= 2
        if length - cuts[-1] < step:
            break
    cuts.append(length)
    d = (z1 - z0) / length
    return [quad.Segment(z0 + d * c0, z0 + d * c1) for c0, c1 in zip(cuts[:-1], cuts[1:])]


def _reverse(pieces):
    return [quad.Segment(p.end(), p.start()) for p in reversed(pieces)]


def z_wedge(params: ModelParams, n: int, m: int, x0: float, half: float, first: float,
            tail_tol: float = 1e-17) -> quad.ContourSpec:
    """Vertical segment x0 ± i·half capped by rays at ±2π/3, panels graded away from x0.

    Ray length doubles until Re Φ at the far end sits log(tail_tol) below Re Φ(x0).
    """
    up = np.exp(2j * math.pi / 3)
    top, bot = complex(x0, half), complex(x0, -half)
    ref = phi(params, n, m, x0).real
    R = max(half, 1.0)
    while phi(params, n, m, top + R * up).real - ref > math.log(tail_tol):
        R *= 2
        if R > 1e8:
            raise ConfigurationError("ray truncation did not reach tail_tol")
    upper = _graded_segment(complex(x0), top, first) + _graded_segment(top, top + R * up, max(first, half / 2))
    lower = _graded_segment(complex(x0), bot, first) + _graded_segment(bot, bot + R * np.conj(up), max(first, half / 2))
    return quad.ContourSpec(tuple(_reverse(lower) + upper))


def saddle_u_contour(params: ModelParams, n: int, delta: float) -> quad.ContourSpec:
    """Closed counterclockwise polygon through n^{1/3}λ - δ and crossing the axis at -a."""
    L = _saddle_scale(params, n)
    a = params.a
    p0 = complex(L - delta)
    A = p0 + 0.45 * L * np.exp(2j * math.pi / 3)
    B = complex(0.35 * L, 0.52 * L)
    h = 0.45 * L
    C = complex(-a, h)
    if not (B.real > -a and A.imag < B.imag + 1e-12 and A.real > B.real):
        # very small saddle scale relative to a: go straight from A to C
        verts = [p0, A, C]
    else:
        verts = [p0, A, B, C]
    upper = []
    for k, (v0, v1) in enumerate(zip(verts[:-1], verts[1:])):
        first = delta if k == 0 else abs(v1 - v0) / 2
        upper += _graded_segment(v0, v1, first) if k == 0 else [quad.Segment(v0, v1)]
    # the vertical crossing at -a is split at the axis so no node lands on the zero of g
    vertical = [quad.Segment(C, complex(-a, 0.0)), quad.Segment(complex(-a, 0.0), np.conj(C))]
    lower = [quad.Segment(np.conj(p.end()), np.conj(p.start())) for p in reversed(upper)]
    return quad.ContourSpec(tuple(upper + vertical + lower), closed=True)


def build_contours(req: ExactLawRequest):
    """(u_contour, z_contour) for the requested preset."""
    p, n, m = req.params, req.n, req.m
    if req.preset == "saddle":
        if n < 1:
            raise ConfigurationError("the saddle preset needs n >= 1")
        L = _saddle_scale(p, n)
        delta = 0.05 * L if req.delta is None else req.delta
        if not 0 < delta < 0.5 * L:
            raise ConfigurationError("delta must lie in (0, n^{1/3}λ/2)")
        u = saddle_u_contour(p, n, delta)
        z = z_wedge(p, n, m, L + delta, L, delta, req.tail_tol)
        return u, z
    if req.preset == "small-circle":
        L = _saddle_scale(p, n) if n >= 1 else 0.0
        r = 0.9 * min((p.a + p.b) / 4, L if n >= 1 else 1.0)
        x0 = max(L + (0.05 * L if req.delta is None else req.delta), r + 0.25)
        u = quad.ContourSpec((quad.Arc(0.0, r),), closed=True)
        z = z_wedge(p, n, m, x0, max(x0, 1.0), (x0 - r) / 2, req.tail_tol)
        return u, z
    raise ConfigurationError(f"unknown preset {req.preset!r}")


def kernel_Kn(params: ModelParams, n: int, m: int, z_grid: quad.NystromGrid):
    """Split-form kernel (log-magnitude, phase) with the z-integral on ``z_grid``."""
    zn = z_grid.nodes
    fz = phi(params, n, m, zn)
    top = fz.real.max()
    cz = z_grid.weights / quad.TWO_PI_I * np.exp(fz - top) * zn

    def kernel(u, v):
        du = zn[None, :] - u[:, None]
        dv = zn[:, None] - v[None, :]
        gap = min(np.abs(du).min(), np.abs(dv).min())
        if gap < 1e-10 * (1 + np.abs(zn).max()):
            raise ConfigurationError("z and u nodes collide; regenerate the grids")
        S = (cz[None, :] / du) @ (1.0 / dv)
        fu = phi(params, n, m, u)
        with np.errstate(divide="ignore", invalid="ignore"):
            lm = np.log(np.abs(S)) + top - fu.real[:, None] - np.log(np.abs(u))[:, None]
            ph = np.angle(S) - fu.imag[:, None] - np.angle(u)[:, None]
        lm = np.where(np.isnan(lm), -np.inf, lm)
        return lm, np.nan_to_num(ph)

    return kernel


def kernel_direct(params: ModelParams, n: int, m: int, z_grid: quad.NystromGrid):
    """The same kernel from (1/2πi)∫ e^{t(z-u)} g(u)/g(z) dz/((z-u)(z-u')) with g evaluated as a rational function."""
    a, b, t = params.a, params.b, params.t

    def g(v):
        return ((a + v) / v) ** n * ((a + v) / (a + b + v)) ** m / v

    zn, w = z_grid.nodes, z_grid.weights / quad.TWO_PI_I

    def k(u, v):
        u = np.asarray(u, dtype=complex)
        v = np.asarray(v, dtype=complex)
        integrand = np.exp(t * (zn[None, None, :] - u[..., None])) * g(u)[..., None] / g(zn)
        integrand = integrand / ((zn - u[..., None]) * (zn - v[..., None]))
        return np.sum(w * integrand, axis=-1)

    return k


def _balance(params, n, m):
    def bal(u):
        return (phi(params, n, m, u).real + np.log(np.abs(u))) / 2

    return bal


def _det_once(req: ExactLawRequest, nodes: int, balance=None):
    u_spec, z_spec = build_contours(req)
    ug = quad.discretize(u_spec, _u_counts(u_spec, nodes), _balance(req.params, req.n, req.m))
    zg = quad.discretize(z_spec, nodes)
    kern = kernel_Kn(req.params, req.n, req.m, zg)
    mat = quad.fredholm_matrix(ug, kern, balance)
    off = np.abs(mat - np.eye(len(ug))).max()
    return complex(np.linalg.det(mat)), off, len(ug) + len(zg)


def _u_counts(spec, nodes):
    # full circles use the trapezoid rule, which needs more points than one GL panel
    return [4 * nodes if isinstance(p, quad.Arc) else nodes for p in spec.pieces]


def prob_height_below(req: ExactLawRequest) -> ExactLawResult:
    """P(H_t(n) < m), doubling the per-panel node count until doubling_tol is met."""
    if req.m <= 0:
        return ExactLawResult(0.0, 0.0, 0.0, 0)
    if req.n < 0:
        raise ConfigurationError("n must be >= 0")
    nodes = req.nodes
    prev, _, _ = _det_once(req, nodes)
    while True:
        nodes *= 2
        val, off, used = _det_once(req, nodes)
        if req.preset == "small-circle" and off > CIRCLE_MAX_ENTRY:
            raise NumericRangeError(
                f"small-circle kernel entries reach {off:.3g}; use the saddle preset for n={req.n}")
        err = abs(val - prev)
        if err < req.doubling_tol or nodes >= req.max_nodes:
            break
        prev = val
    diag = {"max_entry": off, "nodes_per_panel": nodes}
    res = ExactLawResult(val.real, abs(val.imag), err, used, diag)
    if err >= req.doubling_tol or res.imag_residual >= req.imag_tol or not (-1e-8 <= val.real <= 1 + 1e-8):
        raise AccuracyError(f"exact law did not converge for n={req.n}, m={req.m}", {**diag, "result": res})
    return res


def cdf_row(params: ModelParams, n: int, ms, preset: str = "saddle", **kw):
    return [prob_height_below(ExactLawRequest(params, n, int(m), preset, **kw)) for m in ms]


def tw_limit_probe(params: ModelParams, n: int, x: float, **kw):
    from .tracy_widom import F_gue, TWRequest

    m = max(1, m_for(params, n, x))
    res = prob_height_below(ExactLawRequest(params, n, m, "saddle", **kw))
    return {"p_exact": res.p, "F_target": F_gue(TWRequest(x)).F, "m": m}
