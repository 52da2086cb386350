import math

import numpy as np
import pytest
from scipy import stats

from befpp import fpp, pushtasep, scaling
from befpp.errors import ConfigurationError
from befpp.rng import Streams
from befpp.scaling import ModelParams
from befpp.stats import EmpiricalDistribution, ks_critical, ks_one_sample, ks_two_sample

P1 = ModelParams(1.0, 1.0, 1.0)
GUE_MEAN = -1.7710868074  # mean of F_GUE


def _pmf_check(samples, pmf, kmax):
    for k in range(kmax):
        p = pmf(k)
        assert abs(np.mean(samples == k) - p) <= 4 * math.sqrt(p * (1 - p) / samples.size) + 1e-12


def test_initial_gap_law():
    cfg = pushtasep.init_particles(P1, 10**6, Streams(1, 0))
    gaps = np.diff(np.concatenate([[0.0], cfg.positions])).astype(int)
    q = P1.q
    _pmf_check(gaps, lambda k: 0.0 if k == 0 else q ** (k - 1) * (1 - q), 8)


def test_mean_position():
    n = 1000
    pos = pushtasep.simulate_positions(P1, n, 4000, 2, t_end=0.0)
    se = pos.std() / math.sqrt(pos.size)
    assert abs(pos.mean() - 2 * n) <= 4 * se


def test_packed_when_a_small():
    cfg = pushtasep.init_particles(ModelParams(1e-300, 1.0, 1.0), 1000, Streams(1, 0))
    assert np.all(np.diff(cfg.positions) == 1)


def test_single_ring_displacement():
    q = P1.q
    disp = []
    for r in range(100000):
        cfg = pushtasep.init_particles(P1, 1, Streams(3, r))
        out = pushtasep.run_pushtasep(cfg, P1, float(cfg.next_ring[0]))
        disp.append(out.positions[0] - cfg.positions[0])
    disp = np.array(disp, dtype=int)
    _pmf_check(disp, lambda k: 0.0 if k == 0 else q ** (k - 1) * (1 - q), 8)


def test_order_preserved_every_event():
    cfg = pushtasep.init_particles(P1, 2000, Streams(4, 0))
    out = pushtasep.run_pushtasep(cfg, P1, 50.0, check_order=True)
    assert int(out.ring_idx.sum() - cfg.ring_idx.sum()) >= 10**5


def test_zero_time_unchanged():
    cfg = pushtasep.init_particles(P1, 50, Streams(5, 0))
    out = pushtasep.run_pushtasep(cfg, P1, 0.0)
    assert np.array_equal(out.positions, cfg.positions)


@pytest.mark.parametrize("variant", ["geom", "unit", "expo"])
def test_event_and_trajectory_engines_identical(variant):
    for r in range(30):
        s = Streams(6, r)
        if variant == "geom":
            cfg = pushtasep.init_particles(P1, 40, s)
        elif variant == "unit":
            cfg = pushtasep.init_packed(40, s)
        else:
            cfg = pushtasep._new_config(pushtasep.EXPO, 2.0, 1.0, 40, s)
        a = pushtasep.run_pushtasep(cfg, None, 3.0, "event")
        b = pushtasep.run_pushtasep(cfg, None, 3.0, "trajectory")
        assert np.array_equal(a.positions, b.positions)
        assert np.array_equal(a.jump_idx, b.jump_idx)


def test_zero_time_pmf_matches_backbone_law():
    n = 3
    h = pushtasep.simulate_positions(P1, n + 1, 10**6, 7, t_end=0.0) - (n + 1)
    q = P1.q
    _pmf_check(h.astype(int), lambda k: stats.nbinom.pmf(k, n + 1, 1 - q), 12)
    hf = fpp.simulate_heights(P1, n, 10**6, 7, "dp", t_end=0.0)
    _pmf_check(hf, lambda k: stats.nbinom.pmf(k, n + 1, 1 - q), 12)


def test_law_matches_fpp_n50():
    n = 50
    h = fpp.simulate_heights(P1, n, 10**5, 8, "pushtasep")
    d = fpp.simulate_heights(P1, n, 10**5, 8, "dp", prefix="dp/")
    ks = ks_two_sample(EmpiricalDistribution(h), EmpiricalDistribution(d))
    assert ks < ks_critical(0.01, h.size, d.size)


def _centered(n, reps, seed):
    c = scaling.scaling_constants(P1)
    pos = pushtasep.simulate_positions(P1, n, reps, seed)
    return (pos - 2 * n - c.d * np.cbrt(n) ** 2) / (c.sigma * np.cbrt(np.cbrt(n)) ** 4)


def test_centering_mean_n1e4():
    chi = _centered(10**4, 10**4, 9)
    band = 4 * chi.std(ddof=1) / math.sqrt(chi.size)
    assert abs(chi.mean() - GUE_MEAN) <= band, f"mean {chi.mean():.4f} vs {GUE_MEAN:.4f} +- {band:.4f}"


def test_centering_mean_moves_towards_gue():
    gaps = [abs(_centered(n, 4000, 10).mean() - GUE_MEAN) for n in (10, 100, 1000)]
    assert gaps[0] > gaps[1] > gaps[2]


def test_degeneration_to_unit_pushtasep():
    a, tp, n = 1e-3, 2.0, 20
    gen = pushtasep.simulate_positions(ModelParams(a, 1.0, tp / a), n, 10**4, 11)
    lim = pushtasep.simulate_positions(P1, n, 10**4, 12, t_end=tp, variant="push")
    ks = ks_two_sample(EmpiricalDistribution(gen), EmpiricalDistribution(lim))
    assert ks < ks_critical(0.05, gen.size, lim.size)


def test_one_particle_poisson():
    tp = 1.5
    x = pushtasep.simulate_positions(P1, 1, 10**5, 13, t_end=tp, variant="push") - 1
    _pmf_check(x.astype(int), lambda k: stats.poisson.pmf(k, tp), 8)


def test_packed_block_push():
    cfg = pushtasep.init_packed(6, Streams(14, 0))
    cfg.next_ring[:] = np.inf
    cfg.next_ring[0] = 0.5
    for engine in ("event", "trajectory"):
        out = pushtasep.run_pushtasep_limit(cfg, 1.0, 0.5, engine)
        assert np.array_equal(out.positions, cfg.positions + 1)


def test_continuous_initial_gaps_exponential():
    lam, n = 1.5, 10**4
    p = ModelParams((n - lam) / n, lam / n, 1.0)
    cfg = pushtasep.init_particles(p, 20000, Streams(15, 0))
    gaps = np.diff(np.concatenate([[0.0], cfg.positions])) / n
    emp = EmpiricalDistribution(gaps)
    assert ks_one_sample(emp, lambda x: stats.expon.cdf(x, scale=1 / lam)) < ks_critical(0.05, gaps.size)
    cont = pushtasep.run_continuous_pushtasep(lam, 20000, 0.0, Streams(15, 0))
    emp = EmpiricalDistribution(np.diff(np.concatenate([[0.0], cont])))
    assert ks_one_sample(emp, lambda x: stats.expon.cdf(x, scale=1 / lam)) < ks_critical(0.05, cont.size)


def test_continuous_is_scaling_limit():
    lam, n, k, t = 1.5, 10**4, 10, 1.0
    p = ModelParams((n - lam) / n, lam / n, t)
    disc = pushtasep.simulate_positions(p, k, 10**4, 16) / n
    cont = pushtasep.simulate_positions(P1, k, 10**4, 17, t_end=t, variant="continuous", lambda_rate=lam)
    ks = ks_two_sample(EmpiricalDistribution(disc), EmpiricalDistribution(cont))
    assert ks < ks_critical(0.05, disc.size, cont.size)


def test_continuous_order_and_zero_time():
    s = Streams(18, 0)
    cfg = pushtasep._new_config(pushtasep.EXPO, 1.0, 1.0, 3000, s)
    out = pushtasep.run_pushtasep(cfg, None, 40.0, check_order=True)
    assert int(out.ring_idx.sum() - cfg.ring_idx.sum()) >= 10**5
    assert np.array_equal(pushtasep.run_continuous_pushtasep(1.0, 3000, 0.0, s), cfg.positions)


def test_height_from_particles():
    cfg = pushtasep.init_particles(P1, 10, Streams(19, 0))
    assert pushtasep.height_from_particles(cfg, 3) == int(cfg.positions[3]) - 4
    with pytest.raises(ConfigurationError):
        pushtasep.height_from_particles(cfg, 10)


def test_param_mismatch_rejected():
    cfg = pushtasep.init_particles(P1, 5, Streams(1, 0))
    with pytest.raises(ConfigurationError):
        pushtasep.run_pushtasep(cfg, ModelParams(2.0, 1.0, 1.0), 1.0)
    with pytest.raises(ConfigurationError):
        pushtasep.run_continuous_pushtasep(0.0, 5, 1.0, Streams(1, 0))
