"""Geometric jump pushTASEP and its two degenerations.

Positions are labelled from 1: a particle on site k of Z>=0 is reported at k + 1.
With this labelling p_0(n+1) - (n+1) is a sum of n+1 geometric gaps, the law of
H_0(n).  Draws are keyed per particle (ring times, jump sizes, initial gap), so
the event-queue engine and the particle-by-particle trajectory engine produce
identical configurations from the same streams.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np

from . import kernels
from .errors import ConfigurationError
from .parallel import map_chunks
from .rng import Streams, stream_head
from .scaling import ModelParams

GEOM, UNIT, EXPO = 0, 1, 2
LABELS = ("init", "ring", "jump")


@dataclass
class ParticleConfig:
    positions: np.ndarray
    next_ring: np.ndarray
    ring_idx: np.ndarray
    jump_idx: np.ndarray
    key_ring: int
    key_jump: int
    variant: int = GEOM
    param: float = 0.0  # log q for GEOM, the rate λ for EXPO
    rate: float = 1.0
    time: float = 0.0

    @property
    def count(self):
        return len(self.positions)

    def copy(self) -> "ParticleConfig":
        return replace(self, positions=self.positions.copy(), next_ring=self.next_ring.copy(),
                       ring_idx=self.ring_idx.copy(), jump_idx=self.jump_idx.copy())


def _log_q(params: ModelParams) -> float:
    q = params.q
    return math.log(q) if q > 0 else -math.inf


def _new_config(variant, param, rate, count, streams: Streams) -> ParticleConfig:
    if count < 1:
        raise ConfigurationError("count must be >= 1")
    be = kernels.backend
    ki, kr, kj = (streams.key(lab) for lab in LABELS)
    pos = be.push_init(variant, param, int(count), ki)
    nxt, ri, ji = be.push_clocks(rate, int(count), kr)
    return ParticleConfig(pos, nxt, ri, ji, kr, kj, variant, param, rate)


def init_particles(params: ModelParams, count: int, streams: Streams) -> ParticleConfig:
    """Bernoulli(b/(a+b)) occupation of Z>=0 scanned until ``count`` particles exist."""
    return _new_config(GEOM, _log_q(params), params.a, count, streams)


def init_packed(count: int, streams: Streams, rate: float = 1.0) -> ParticleConfig:
    """Fully packed start 1, 2, ..., count for the unit-jump limit."""
    return _new_config(UNIT, 0.0, rate, count, streams)


def run_pushtasep(config: ParticleConfig, params: ModelParams | None = None, t_end: float = 0.0,
                  engine: str = "event", check_order: bool = False) -> ParticleConfig:
    """Advance a copy of ``config`` to absolute time ``t_end``.

    ``engine='event'`` processes rings from a priority queue and sweeps pushes
    to the right; ``engine='trajectory'`` builds each particle's path from its
    own rings and its left neighbour's moves.  ``params``, if given, must agree
    with the config's clock rate and gap law.
    """
    if params is not None and config.variant == GEOM:
        if not (math.isclose(config.rate, params.a) and config.param == _log_q(params)):
            raise ConfigurationError("config was initialised with different parameters")
    if t_end < config.time:
        raise ConfigurationError("cannot run backwards in time")
    out = config.copy()
    be = kernels.backend
    args = (out.variant, out.param, out.rate, float(t_end), out.positions, out.next_ring,
            out.ring_idx, out.jump_idx, out.key_ring, out.key_jump)
    if engine == "event":
        be.push_event(*args, check_order)
    elif engine == "trajectory":
        be.push_traj(*args)
    else:
        raise ConfigurationError(f"unknown engine {engine!r}")
    out.time = float(t_end)
    return out


def run_pushtasep_limit(config: ParticleConfig, rate: float = 1.0, t_end: float = 0.0,
                        engine: str = "event") -> ParticleConfig:
    """Unit jumps and unit pushes with rate-``rate`` clocks (time t' = t/a of the general model)."""
    if config.variant != UNIT:
        raise ConfigurationError("limit dynamics needs a config from init_packed")
    if not math.isclose(config.rate, rate):
        raise ConfigurationError("config clock rate differs from the requested rate")
    return run_pushtasep(config, None, t_end, engine)


def run_continuous_pushtasep(lambda_rate: float, count: int, t_end: float, streams: Streams,
                             engine: str = "event") -> np.ndarray:
    """Continuous-space variant: Exp(λ) initial gaps, jumps and pushes, rate-1 clocks."""
    if not lambda_rate > 0:
        raise ConfigurationError("lambda_rate must be positive")
    cfg = _new_config(EXPO, float(lambda_rate), 1.0, count, streams)
    return run_pushtasep(cfg, None, t_end, engine).positions


def height_from_particles(config: ParticleConfig, n: int, index_offset: int = 1) -> int:
    """p_t(n + offset) - (n + offset), the pushTASEP image of H_t(n)."""
    idx = n + index_offset
    if idx < 1 or idx > config.count:
        raise ConfigurationError(f"need particle {idx} but only {config.count} simulated")
    return int(config.positions[idx - 1]) - idx


def simulate_positions(params: ModelParams, index: int, reps: int, seed: int, t_end: float | None = None,
                       threads: int | None = None, prefix: str = "", variant: str = "geom",
                       lambda_rate: float = 1.0) -> np.ndarray:
    """Position of particle ``index`` at time t_end (default params.t) for replicas 0..reps-1.

    ``variant`` selects the geometric model, ``push`` (unit jumps, rate-1
    clocks) or ``continuous`` (Exp(lambda_rate) increments, rate-1 clocks).
    """
    if index < 1:
        raise ConfigurationError("index must be >= 1")
    t_end = params.t if t_end is None else float(t_end)
    code, param, rate = {
        "geom": (GEOM, _log_q(params), params.a),
        "push": (UNIT, 0.0, 1.0),
        "continuous": (EXPO, float(lambda_rate), 1.0),
    }[variant]
    heads = [stream_head(seed, prefix + lab) for lab in LABELS]
    be = kernels.backend
    return map_chunks(lambda r0, r1: be.push_batch(code, param, rate, t_end, int(index), heads, r0, r1),
                      reps, threads)
