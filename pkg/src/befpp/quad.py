"""Piecewise complex contours, quadrature rules and Nyström Fredholm determinants."""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from .errors import ConfigurationError, NumericRangeError

TWO_PI_I = 2j * math.pi


@dataclass(frozen=True)
class Segment:
    z0: complex
    z1: complex

    def start(self):
        return complex(self.z0)

    def end(self):
        return complex(self.z1)

    def length(self):
        return abs(self.z1 - self.z0)


@dataclass(frozen=True)
class Arc:
    """Circular arc from angle ``theta0`` to ``theta1`` (counterclockwise if theta1 > theta0)."""

    center: complex
    radius: float
    theta0: float = 0.0
    theta1: float = 2 * math.pi

    @property
    def full(self):
        return abs(abs(self.theta1 - self.theta0) - 2 * math.pi) < 1e-14

    def start(self):
        return self.center + self.radius * np.exp(1j * self.theta0)

    def end(self):
        return self.center + self.radius * np.exp(1j * self.theta1)

    def length(self):
        return self.radius * abs(self.theta1 - self.theta0)


@dataclass(frozen=True)
class Ray:
    """Straight ray piece ``origin + s e^{i angle}``, s in [0, length].

    With ``inward=True`` it is traversed from the far end back to the origin.
    """

    origin: complex
    angle: float
    length_: float
    inward: bool = False

    def _far(self):
        return self.origin + self.length_ * np.exp(1j * self.angle)

    def start(self):
        return complex(self._far() if self.inward else self.origin)

    def end(self):
        return complex(self.origin if self.inward else self._far())

    def length(self):
        return self.length_


@dataclass(frozen=True)
class ContourSpec:
    pieces: tuple
    orientation: int = 1
    closed: bool = False

    def __post_init__(self):
        if not self.pieces:
            raise ConfigurationError("contour has no pieces")
        for p, q in zip(self.pieces[:-1], self.pieces[1:]):
            if abs(p.end() - q.start()) > 1e-9 * (1 + abs(p.end())):
                raise ConfigurationError(f"pieces do not join: {p.end()} vs {q.start()}")
        if self.closed:
            first, last = self.pieces[0], self.pieces[-1]
            if abs(last.end() - first.start()) > 1e-9 * (1 + abs(first.start())):
                raise ConfigurationError("closed contour does not return to its start")

    def flipped(self) -> "ContourSpec":
        return ContourSpec(self.pieces, -self.orientation, self.closed)

    def length(self):
        return sum(p.length() for p in self.pieces)

    def winding_number(self, w: complex, nodes: int = 400) -> int:
        """Winding number about ``w`` from the argument change along a fine polyline."""
        pts = np.concatenate([_sample(p, nodes) for p in self.pieces])
        if self.closed:
            pts = np.append(pts, pts[0])
        ang = np.unwrap(np.angle(pts - w))
        return int(round(self.orientation * (ang[-1] - ang[0]) / (2 * math.pi)))


def _sample(piece, n):
    s = np.linspace(0.0, 1.0, n, endpoint=False)
    if isinstance(piece, Arc):
        th = piece.theta0 + s * (piece.theta1 - piece.theta0)
        return piece.center + piece.radius * np.exp(1j * th)
    z0, z1 = piece.start(), piece.end()
    return z0 + s * (z1 - z0)


def _gauss_legendre(n):
    return np.polynomial.legendre.leggauss(n)


def _piece_rule(piece, n):
    if n < 1:
        raise ConfigurationError("a piece needs at least one node")
    if isinstance(piece, Arc):
        dth = piece.theta1 - piece.theta0
        if piece.full:
            # periodic trapezoid rule, offset by half a step
            th = piece.theta0 + dth * (np.arange(n) + 0.5) / n
            w = np.full(n, dth / n)
        else:
            x, w0 = _gauss_legendre(n)
            th = piece.theta0 + dth * (x + 1) / 2
            w = w0 * dth / 2
        e = np.exp(1j * th)
        return piece.center + piece.radius * e, w * 1j * piece.radius * e
    z0, z1 = piece.start(), piece.end()
    x, w0 = _gauss_legendre(n)
    nodes = z0 + (z1 - z0) * (x + 1) / 2
    return nodes, w0 * (z1 - z0) / 2


@dataclass
class NystromGrid:
    nodes: np.ndarray
    weights: np.ndarray
    balance: np.ndarray
    contour: ContourSpec
    nodes_per_piece: tuple
    balance_fn: Callable | None = field(default=None, repr=False)

    def __len__(self):
        return len(self.nodes)

    def refined(self, factor: int = 2) -> "NystromGrid":
        return discretize(self.contour, [k * factor for k in self.nodes_per_piece], self.balance_fn)


def discretize(contour: ContourSpec, nodes_per_piece, balance_fn=None) -> NystromGrid:
    """Quadrature nodes and weights (rule weight times dz/ds) on every piece.

    Full circles use the trapezoid rule, everything else Gauss-Legendre.
    ``balance_fn(nodes)`` returns real per-node log scales (default zeros).
    """
    if np.isscalar(nodes_per_piece):
        npp = tuple(int(nodes_per_piece) for _ in contour.pieces)
    else:
        npp = tuple(int(k) for k in nodes_per_piece)
    if len(npp) != len(contour.pieces):
        raise ConfigurationError("nodes_per_piece length does not match the piece count")
    if any(k < 1 for k in npp):
        raise ConfigurationError("zero nodes on a piece")
    zs, ws = zip(*(_piece_rule(p, k) for p, k in zip(contour.pieces, npp)))
    nodes = np.concatenate(zs)
    weights = contour.orientation * np.concatenate(ws)
    bal = np.zeros(len(nodes)) if balance_fn is None else np.asarray(balance_fn(nodes), dtype=float)
    if bal.shape != nodes.shape or np.iscomplexobj(bal):
        raise ConfigurationError("balance must be a real array with one entry per node")
    return NystromGrid(nodes, weights, bal, contour, npp, balance_fn)


def integrate(grid: NystromGrid, f) -> complex:
    return complex(np.sum(grid.weights * f(grid.nodes)))


def pointwise_kernel(f):
    """Wrap a complex kernel f(u, v) (broadcasting) into the split (logmag, phase) form."""

    def kernel(u, v):
        with np.errstate(divide="ignore"):
            k = f(u[:, None], v[None, :])
            return np.log(np.abs(k)), np.angle(k)

    return kernel


@dataclass(frozen=True)
class FredholmResult:
    value: complex
    doubling_error: float
    nodes: int


def fredholm_matrix(grid: NystromGrid, kernel, balance=None) -> np.ndarray:
    """Balanced Nyström matrix I - D K W D^{-1}, with the 1/(2πi) folded into W."""
    u = grid.nodes
    logmag, phase = kernel(u, u)
    logmag = np.asarray(logmag, dtype=float)
    phase = np.asarray(phase, dtype=float)
    beta = grid.balance if balance is None else np.asarray(balance, dtype=float)
    om = grid.weights / TWO_PI_I
    with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
        lm = logmag + beta[:, None] - beta[None, :] + np.log(np.abs(om))[None, :]
        # -inf log-magnitudes are exact zeros (underflow convention)
        zero = np.isneginf(logmag)
        lm = np.where(zero, -np.inf, lm)
        ph = phase + np.angle(om)[None, :]
        ent = np.exp(lm) * np.exp(1j * ph)
    ent = np.where(zero, 0.0, ent)
    bad = ~np.isfinite(ent)
    if bad.any():
        j, k = np.argwhere(bad)[0]
        raise NumericRangeError(f"non-finite kernel entry at nodes {u[j]!r}, {u[k]!r}")
    return np.eye(len(u)) - ent


def fredholm_det(grid: NystromGrid, kernel, doubling: bool = True, balance=None) -> FredholmResult:
    """det(I - K) on the grid by complex LU, with an optional node-doubling error estimate.

    When ``doubling`` is set the value from the refined grid is returned and
    ``doubling_error`` is the difference between the two resolutions.
    """
    val = complex(np.linalg.det(fredholm_matrix(grid, kernel, balance)))
    if not doubling:
        return FredholmResult(val, float("nan"), len(grid))
    fine = grid.refined()
    val2 = complex(np.linalg.det(fredholm_matrix(fine, kernel)))
    return FredholmResult(val2, abs(val2 - val), len(fine))


def fredholm_series(grid: NystromGrid, kernel_fn, order: int = 3) -> complex:
    """Truncated Fredholm series sum_{m<=order} (-1)^m/m! ∮..∮ det[K(x_i,x_j)].

    Brute-force nested sums over the grid; meant only for tiny grids in tests.
    """
    import itertools

    u = grid.nodes
    om = grid.weights / TWO_PI_I
    total = 1.0 + 0j
    for m in range(1, order + 1):
        acc = 0j
        for idx in itertools.product(range(len(u)), repeat=m):
            pts = u[list(idx)]
            mat = kernel_fn(pts[:, None], pts[None, :])
            acc += np.prod(om[list(idx)]) * np.linalg.det(np.atleast_2d(mat))
        total += (-1) ** m / math.factorial(m) * acc
    return total
