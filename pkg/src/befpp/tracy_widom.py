"""GUE Tracy-Widom distribution by two Fredholm determinants.

``airy``: Nyström on (x, ∞) for the Airy kernel, with Ai from a contour integral.
``contour``: the cubic-exponential kernel on a wedge through -1, with its inner
integral on a wedge through 0.
"""
from __future__ import annotations

import functools
import math
from dataclasses import dataclass

import numpy as np

from . import quad
from .errors import AccuracyError, DomainError

X_MIN, X_MAX = -10.0, 6.0
MAP_L = 10.0


@functools.lru_cache(maxsize=None)
def _gl(n, lo, hi):
    x, w = np.polynomial.legendre.leggauss(n)
    return lo + (hi - lo) * (x + 1) / 2, w * (hi - lo) / 2


def _ray_rule(length, n):
    # two GL panels, denser near the vertex
    r1, w1 = _gl(n, 0.0, min(2.0, length))
    r2, w2 = _gl(n, min(2.0, length), length)
    return np.concatenate([r1, r2]), np.concatenate([w1, w2])


def _airy_contour(s: float, nodes: int = 60):
    """(1/2πi)∫ e^{z³/3 - zs} (1, -z) dz, returned as complex (Ai, Ai')."""
    up = np.exp(1j * math.pi / 3)
    dn = np.conj(up)
    r, w = _ray_rule(8.0, nodes)
    if s >= 0:
        v = math.sqrt(s)
        # exponent shifted by its value at the saddle v, restored at the end
        scale = math.exp(-2.0 / 3.0 * s * v) if s * v < 1e300 else 0.0
        zu, zd = v + r * up, v + r * dn
        eu = np.exp(v * (r * up) ** 2 + (r * up) ** 3 / 3) * up
        ed = np.exp(v * (r * dn) ** 2 + (r * dn) ** 3 / 3) * dn
        ai = scale * np.sum(w * (eu - ed))
        aip = scale * np.sum(w * (-zu * eu + zd * ed))
        return ai / (2j * math.pi), aip / (2j * math.pi)
    c = math.sqrt(-s)
    zu, zd = 1j * c + r * up, -1j * c + r * dn
    eu = np.exp(zu**3 / 3 - zu * s) * up
    ed = np.exp(zd**3 / 3 - zd * s) * dn
    nseg = 40 + 2 * int(8 * c**3 / 3)
    y, wy = _gl(nseg, -c, c)
    zs = 1j * y
    es = np.exp(zs**3 / 3 - zs * s) * 1j
    ai = np.sum(w * eu) - np.sum(w * ed) + np.sum(wy * es)
    aip = np.sum(w * -zu * eu) - np.sum(w * -zd * ed) + np.sum(wy * -zs * es)
    return ai / (2j * math.pi), aip / (2j * math.pi)


def _airy_pair_array(s):
    """Real (Ai, Ai') at every point of ``s``; same contours as ``_airy_contour``, batched."""
    s = np.atleast_1d(np.asarray(s, dtype=float))
    ai = np.empty(len(s))
    aip = np.empty(len(s))
    up = np.exp(1j * math.pi / 3)
    dn = np.conj(up)
    r, w = _ray_rule(8.0, 60)
    pos = s >= 0
    if pos.any():
        sp = s[pos]
        v = np.sqrt(sp)[:, None]
        with np.errstate(under="ignore"):
            scale = np.exp(-2.0 / 3.0 * sp * v[:, 0])
        ru, rd = r * up, r * dn
        eu = np.exp(v * ru**2 + ru**3 / 3) * up
        ed = np.exp(v * rd**2 + rd**3 / 3) * dn
        a = scale * ((eu - ed) @ w)
        ap = scale * ((-(v + ru) * eu + (v + rd) * ed) @ w)
        ai[pos] = (a / (2j * math.pi)).real
        aip[pos] = (ap / (2j * math.pi)).real
    neg = ~pos
    if neg.any():
        sn = s[neg][:, None]
        c = np.sqrt(-sn)
        nseg = 40 + 2 * int(8 * c.max() ** 3 / 3)
        y, wy = _gl(nseg, -1.0, 1.0)
        zu, zd = 1j * c + r * up, -1j * c + r * dn
        eu = np.exp(zu**3 / 3 - zu * sn) * up
        ed = np.exp(zd**3 / 3 - zd * sn) * dn
        zs = 1j * c * y
        es = np.exp(zs**3 / 3 - zs * sn) * 1j * c[:, 0:1]
        a = eu @ w - ed @ w + es @ wy
        ap = (-zu * eu) @ w - (-zd * ed) @ w + (-zs * es) @ wy
        ai[neg] = (a / (2j * math.pi)).real
        aip[neg] = (ap / (2j * math.pi)).real
    return ai, aip


def airy_ai(s, with_residual: bool = False):
    """Ai(s) for s in [-20, 20] from its contour integral representation."""
    arr = np.atleast_1d(np.asarray(s, dtype=float))
    if np.any((arr < -20) | (arr > 20)) or not np.all(np.isfinite(arr)):
        raise DomainError("airy_ai supports s in [-20, 20]")
    vals = [_airy_contour(float(v))[0] for v in arr]
    out = np.array([v.real for v in vals])
    res = np.array([abs(v.imag) for v in vals])
    if np.ndim(s) == 0:
        out, res = float(out[0]), float(res[0])
    return (out, res) if with_residual else out


def airy_ai_prime(s):
    arr = np.atleast_1d(np.asarray(s, dtype=float))
    if np.any((arr < -20) | (arr > 20)):
        raise DomainError("airy_ai_prime supports s in [-20, 20]")
    out = np.array([_airy_contour(float(v))[1].real for v in arr])
    return float(out[0]) if np.ndim(s) == 0 else out


@dataclass(frozen=True)
class TWRequest:
    x: float
    method: str = "airy"
    nodes: int | None = None
    tol: float = 1e-8


@dataclass(frozen=True)
class TWResult:
    F: float
    doubling_error: float
    imag_residual: float = 0.0
    tail: bool = False


DEFAULT_NODES = {"airy": 64, "contour": 64}


def _airy_det(x, n):
    xi, wx = _gl(n, -1.0, 1.0)
    s = x + MAP_L * (1 + xi) / (1 - xi)
    w = wx * 2 * MAP_L / (1 - xi) ** 2
    ai, aip = _airy_pair_array(s)
    ds = s[:, None] - s[None, :]
    np.fill_diagonal(ds, 1.0)
    k = (ai[:, None] * aip[None, :] - aip[:, None] * ai[None, :]) / ds
    np.fill_diagonal(k, aip**2 - s * ai**2)
    sw = np.sqrt(w)
    return float(np.linalg.det(np.eye(n) - sw[:, None] * k * sw[None, :]))


def _contour_grids(n, ray_len=8.0):
    """u on the wedge through -1 (±2π/3), s on the wedge through 0 (±π/3)."""
    th_u, th_s = 2 * math.pi / 3, math.pi / 3
    u_spec = quad.ContourSpec(_wedge_pieces(-1.0, th_u, ray_len))
    s_spec = quad.ContourSpec(_wedge_pieces(0.0, th_s, ray_len))
    return u_spec, s_spec


def _wedge_pieces(vertex, angle, length, split=2.0):
    lo = np.exp(-1j * angle)
    hi = np.exp(1j * angle)
    v = complex(vertex)
    return (
        quad.Segment(v + length * lo, v + split * lo),
        quad.Segment(v + split * lo, v),
        quad.Segment(v, v + split * hi),
        quad.Segment(v + split * hi, v + length * hi),
    )


def contour_kernel(x, s_grid):
    """Split-form kernel of det(I - K_(x)) with the inner s-integral discretised on ``s_grid``."""
    sn = s_grid.nodes
    cs = s_grid.weights / quad.TWO_PI_I * np.exp(sn**3 / 3 - x * sn)

    def kernel(u, v):
        a = cs[None, :] / (sn[None, :] - u[:, None])
        b = 1.0 / (sn[:, None] - v[None, :])
        S = a @ b
        phi = u**3 / 3 - x * u
        with np.errstate(divide="ignore"):
            return np.log(np.abs(S)) - phi.real[:, None], np.angle(S) - phi.imag[:, None]

    return kernel


def _contour_det(x, n):
    u_spec, s_spec = _contour_grids(n)
    bal = lambda u: (u**3 / 3 - x * u).real / 2  # noqa: E731
    ug = quad.discretize(u_spec, n // 2, bal)
    sg = quad.discretize(s_spec, n // 2)
    res = quad.fredholm_det(ug, contour_kernel(x, sg), doubling=False)
    return res.value


def F_gue(req: TWRequest) -> TWResult:
    x = float(req.x)
    if x < X_MIN:
        return TWResult(0.0, 0.0, 0.0, True)
    if x > X_MAX:
        return TWResult(1.0, 0.0, 0.0, True)
    n = req.nodes or DEFAULT_NODES[req.method]
    if req.method == "airy":
        f1, f2 = _airy_det(x, n), _airy_det(x, 2 * n)
        imag = 0.0
    elif req.method == "contour":
        if x < -5:
            raise DomainError("contour method is limited to x >= -5 (cancellation)")
        v1, v2 = _contour_det(x, n), _contour_det(x, 2 * n)
        f1, f2, imag = v1.real, v2.real, abs(v2.imag)
    else:
        raise DomainError(f"unknown method {req.method!r}")
    err = abs(f2 - f1)
    if err > req.tol or imag > req.tol:
        raise AccuracyError(f"F_GUE({x}) did not converge", {"doubling_error": err, "imag": imag})
    return TWResult(min(max(f2, 0.0), 1.0), err, imag)


def ab_ba_check(x: float):
    lhs = F_gue(TWRequest(x, "contour")).F
    rhs = F_gue(TWRequest(x, "airy")).F
    return {"lhs": lhs, "rhs": rhs, "diff": abs(lhs - rhs)}


GRID_POINTS = 600


@functools.lru_cache(maxsize=1)
def gue_table():
    """F_GUE on 600 equispaced points of [-10, 6] (airy method)."""
    xs = np.linspace(X_MIN, X_MAX, GRID_POINTS)
    fs = np.array([F_gue(TWRequest(float(x))).F for x in xs])
    return xs, np.maximum.accumulate(fs)


@functools.lru_cache(maxsize=1)
def gue_cdf():
    """Monotone cubic interpolant of the tabulated F_GUE, clamped to 0/1 outside the table."""
    from scipy.interpolate import PchipInterpolator

    xs, fs = gue_table()
    pch = PchipInterpolator(xs, fs, extrapolate=False)

    def cdf(x):
        x = np.asarray(x, dtype=float)
        out = np.where(x < X_MIN, 0.0, np.where(x > X_MAX, 1.0, 0.0))
        inside = (x >= X_MIN) & (x <= X_MAX)
        out = np.where(inside, np.nan_to_num(pch(np.clip(x, X_MIN, X_MAX))), out)
        return np.clip(out, 0.0, 1.0)

    return cdf
