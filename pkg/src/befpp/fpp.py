"""Exact samplers for Bernoulli-exponential first passage percolation.

Two methods share one lazily hashed environment per replica:
``event`` grows the cluster with a priority queue of exponential clocks,
``dp`` fills passage times row by row.  Both see the same coins and weights,
so for equal streams they return identical heights.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import stats

from . import kernels
from .errors import ConfigurationError, ResourceLimitError
from .parallel import map_chunks
from .rng import Streams, stream_head, to_unit, bits, index_hash
from .scaling import ModelParams, scaling_constants

LABELS = ("coin", "vert", "horz")
EVENT_CAP = 10**9
ROW_DOUBLINGS = 6


@dataclass
class HeightProfile:
    heights: np.ndarray
    truncated: bool = False


@dataclass
class ClusterState:
    """Final cluster inside the window: vertex coordinates with insertion times."""

    xs: np.ndarray
    ys: np.ndarray
    times: np.ndarray
    events: int
    window: int

    def __len__(self):
        return len(self.xs)


def _keys(streams: Streams):
    return [streams.key(lab) for lab in LABELS]


def initial_row_cap(params: ModelParams, N: int) -> int:
    c = scaling_constants(params)
    n = float(N)
    return int(math.ceil(params.a / params.b * n + c.d * np.cbrt(n) ** 2
                         + 10 * c.sigma * np.cbrt(np.cbrt(n)) ** 4 + 20))


def sample_backbone(params: ModelParams, N: int, streams: Streams):
    """Time-zero path from the origin following the coins, up to column N.

    Returns ``(path, heights)``: the list of lattice points and H_0(n) for n <= N.
    """
    if N < 0:
        raise ConfigurationError("N must be >= 0")
    kc = streams.key("coin")
    p_east = params.p_east
    path = []
    heights = np.zeros(N + 1, dtype=np.int64)
    i = j = 0
    base = index_hash(kc, 0)
    while i <= N:
        path.append((i, j))
        heights[i] = j
        if to_unit(bits(base, j)) < p_east:
            i += 1
            base = index_hash(kc, i)
        else:
            j += 1
    return path, heights


def grow_cluster(params: ModelParams, N: int, t_end: float, streams: Streams,
                 event_cap: int = EVENT_CAP, snapshot: bool = True):
    if N < 0 or t_end < 0:
        raise ConfigurationError("need N >= 0 and t_end >= 0")
    h, events, snap, capped = kernels.backend.fpp_event(
        params.a, params.b, float(t_end), int(N), _keys(streams), int(event_cap), bool(snapshot))
    if capped:
        raise ResourceLimitError(f"event cap {event_cap} exceeded", HeightProfile(h, True))
    if snap is None:
        snap = (np.empty(0, np.int64), np.empty(0, np.int64), np.empty(0))
    return ClusterState(*snap, events=int(events), window=int(N)), HeightProfile(h)


def dp_heights(params: ModelParams, N: int, t_end: float, streams: Streams,
               row_cap: int | None = None) -> HeightProfile:
    """Heights from passage times; the row cap doubles on failure before giving up."""
    if N < 0:
        raise ConfigurationError("N must be >= 0")
    cap = row_cap or initial_row_cap(params, N)
    for _ in range(ROW_DOUBLINGS + 1):
        h, trunc = kernels.backend.fpp_dp(params.a, params.b, float(t_end), int(N), _keys(streams), int(cap))
        if not trunc:
            return HeightProfile(h)
        cap *= 2
    raise ResourceLimitError(f"row cap {cap // 2} exceeded", HeightProfile(h, True))


def cluster_snapshot(params: ModelParams, N: int, t_end: float, streams: Streams):
    """Every cluster vertex as ``(x, y, insertion_time)``, sorted by (x, y)."""
    state, _ = grow_cluster(params, N, t_end, streams, snapshot=True)
    return list(zip(state.xs.tolist(), state.ys.tolist(), state.times.tolist()))


def column0_survival(params: ModelParams, m: int) -> float:
    """P(H_t(0) >= m): the column-0 passage time to height m is a thinned sum of Exp(a)."""
    if m <= 0:
        return 1.0
    k = np.arange(m + 1)
    w = stats.binom.pmf(k, m, params.p_east)
    g = np.where(k == 0, 1.0, stats.gamma.cdf(params.t, np.maximum(k, 1), scale=1.0 / params.a))
    return float(np.sum(w * g))


def simulate_heights(params: ModelParams, n: int, reps: int, seed: int, method: str = "dp",
                     threads: int | None = None, prefix: str = "", offset: int = 1,
                     t_end: float | None = None) -> np.ndarray:
    """H_t(n) for replicas 0..reps-1 by ``event``, ``dp`` or ``pushtasep`` (offset-matched).

    ``t_end`` defaults to ``params.t``.
    """
    t_end = params.t if t_end is None else float(t_end)
    if t_end < 0:
        raise ConfigurationError("t_end must be >= 0")
    if n < 0:
        raise ConfigurationError("n must be >= 0")
    be = kernels.backend
    if method == "pushtasep":
        from .pushtasep import simulate_positions

        idx = n + offset
        if idx < 1:
            raise ConfigurationError("n + offset must be >= 1")
        pos = simulate_positions(params, idx, reps, seed, t_end, threads=threads, prefix=prefix)
        return (pos - idx).astype(np.int64)
    if method not in ("event", "dp"):
        raise ConfigurationError(f"unknown method {method!r}")
    heads = [stream_head(seed, prefix + lab) for lab in LABELS]

    def chunk(r0, r1):
        cap = EVENT_CAP if method == "event" else initial_row_cap(params, n)
        for _ in range(ROW_DOUBLINGS + 1):
            out, flag = be.fpp_batch(method, params.a, params.b, t_end, n, n, heads, r0, r1, cap)
            if not flag:
                return out
            if method == "event":
                break
            cap *= 2
        raise ResourceLimitError(f"{method} cap exceeded in replicas {r0}..{r1}")

    return map_chunks(chunk, reps, threads).astype(np.int64)
