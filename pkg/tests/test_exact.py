import numpy as np
import pytest

from befpp import exact, fpp, quad
from befpp.errors import ConfigurationError
from befpp.exact import ExactLawRequest
from befpp.scaling import ModelParams

P1 = ModelParams(1.0, 1.0, 1.0)


def test_u_contour_winding():
    u, z = exact.build_contours(ExactLawRequest(P1, 1, 4))
    assert u.winding_number(0.0) == 1
    assert u.winding_number(-2.0) == 0
    starts = [p.start() for p in u.pieces]
    assert abs(starts[0] - 1.0) < 0.1
    assert any(abs(s + 1.0) < 1e-12 for s in starts)


def test_z_rays_decay():
    req = ExactLawRequest(P1, 5, 10)
    _, z = exact.build_contours(req)
    ref = exact.phi(P1, 5, 10, z.pieces[len(z.pieces) // 2].start()).real
    for end in (z.pieces[0].start(), z.pieces[-1].end()):
        assert exact.phi(P1, 5, 10, end).real - ref < np.log(req.tail_tol)


def test_kernel_forms_agree():
    n, m = 2, 3
    u, z = exact.build_contours(ExactLawRequest(P1, n, m))
    ug = quad.discretize(u, 8)
    zg = quad.discretize(z, 32)
    lm, ph = exact.kernel_Kn(P1, n, m, zg)(ug.nodes, ug.nodes)
    split = np.exp(lm + 1j * ph)
    direct = exact.kernel_direct(P1, n, m, zg)(ug.nodes[:, None], ug.nodes[None, :])
    assert np.max(np.abs(split - direct) / np.abs(direct)) < 1e-10


def test_kernel_deterministic():
    u, z = exact.build_contours(ExactLawRequest(P1, 3, 5))
    ug, zg = quad.discretize(u, 8), quad.discretize(z, 16)
    k = exact.kernel_Kn(P1, 3, 5, zg)
    a, b = k(ug.nodes, ug.nodes), k(ug.nodes, ug.nodes)
    assert np.array_equal(a[0], b[0]) and np.array_equal(a[1], b[1])


def test_monotone_in_m():
    ps = [exact.prob_height_below(ExactLawRequest(P1, 5, m)).p for m in range(1, 31)]
    assert all(x <= y + 1e-12 for x, y in zip(ps, ps[1:]))
    assert 0 <= ps[0] and ps[-1] <= 1


def test_nonpositive_m():
    assert exact.prob_height_below(ExactLawRequest(P1, 4, 0)).p == 0.0
    assert exact.prob_height_below(ExactLawRequest(P1, 4, -3)).p == 0.0


@pytest.mark.parametrize("n,m", [(1, 3), (2, 5), (5, 10), (8, 14)])
def test_presets_agree(n, m):
    a = exact.prob_height_below(ExactLawRequest(P1, n, m, "saddle"))
    b = exact.prob_height_below(ExactLawRequest(P1, n, m, "small-circle"))
    assert abs(a.p - b.p) <= 1e-8
    assert a.imag_residual < 1e-8 and b.imag_residual < 1e-8


def test_random_rebalancing():
    req = ExactLawRequest(P1, 4, 8)
    base, _, _ = exact._det_once(req, 32)
    u, _ = exact.build_contours(req)
    n_u = len(quad.discretize(u, exact._u_counts(u, 32)))
    rng = np.random.default_rng(0)
    ug = quad.discretize(u, exact._u_counts(u, 32), exact._balance(P1, 4, 8))
    for _ in range(3):
        beta = ug.balance + rng.normal(scale=2.0, size=n_u)
        val, _, _ = exact._det_once(req, 32, beta)
        assert abs(val - base) <= 1e-10 * abs(base)


def test_column0_closed_form():
    for m in range(1, 11):
        p = exact.prob_height_below(ExactLawRequest(P1, 0, m, "small-circle")).p
        assert p == pytest.approx(1 - fpp.column0_survival(P1, m), abs=1e-10)


def test_saddle_needs_positive_n():
    with pytest.raises(ConfigurationError):
        exact.prob_height_below(ExactLawRequest(P1, 0, 3, "saddle"))
    with pytest.raises(ConfigurationError):
        exact.prob_height_below(ExactLawRequest(P1, 3, 3, "nope"))


def test_mc_agreement_small_n():
    for n in (1, 4):
        h = fpp.simulate_heights(P1, n, 2 * 10**5, 31, "dp")
        lo, hi = np.quantile(h, [0.05, 0.95]).astype(int)
        for m in range(lo, hi + 2):
            p = exact.prob_height_below(ExactLawRequest(P1, n, m)).p
            se = np.sqrt(p * (1 - p) / h.size)
            assert abs(p - np.mean(h < m)) <= 4 * se


def test_tw_probe_tails_and_trend():
    assert exact.tw_limit_probe(P1, 200, -8.0)["p_exact"] < 1e-3
    assert exact.tw_limit_probe(P1, 200, 4.0)["p_exact"] > 0.999
    gaps = []
    for n in (50, 200, 800):
        r = exact.tw_limit_probe(P1, n, 0.0)
        gaps.append(abs(r["p_exact"] - r["F_target"]))
    assert gaps[0] > gaps[1] > gaps[2]
