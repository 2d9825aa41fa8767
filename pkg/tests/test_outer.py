import math

import numpy as np
import pytest

from cograte.achievable import mu_sum_achievable, trace_boundary
from cograte.channel import CognitiveChannel
from cograte.errors import (
    InfeasibleAllocation,
    SingularSigmaZ,
    UnsupportedMu,
)
from cograte.outer import (
    NoiseCoupling,
    OuterAllocation,
    bc_mu_sum,
    condition_check,
    inf_alpha_partial_outer,
    min_outer_mu_sum_over_coupling,
    mu_sum_outer,
    mu_sum_partial_outer,
    outer_rates,
    partial_outer_max_rp,
    partial_outer_rates,
    partial_start_from_achievable,
    trace_outer_boundary,
)
from cograte.oracles import grid_oracle
from cograte.solvers import SolverSettings

MAX_RP = 2.354204853970093
FLIPPED_A1 = 2.40934687718198

# channel where the unstructured cognitive covariance strictly beats the
# block-structured one at mu = 1 (found by randomized search, gap ~ 0.40 bits
# certified against the exhaustive scalar oracle)
GAP_CHANNEL = CognitiveChannel(
    h_pp=[[-0.8138]], h_pc=[[0.1]], h_cp=[[1.232]], h_cc=[[1.129]],
    p_p=5.0, p_c=5.0, real_mode=True,
)


def test_noise_coupling_validation():
    NoiseCoupling(np.array([[0.3, 0.4]]))
    with pytest.raises(SingularSigmaZ):
        NoiseCoupling(np.array([[0.9, 0.9]]))  # norm > 1
    nz = NoiseCoupling(np.array([[0.2, -0.1]]))
    sz = nz.sigma_z()
    assert sz.shape == (3, 3)
    assert np.allclose(sz, sz.T) and np.allclose(np.diag(sz), 1.0)


def test_outer_rates_zero_cognitive_covariance(sec7):
    a = OuterAllocation(q_p=np.diag([5.0, 5.0]), q_c=np.zeros((2, 2)))
    for qz in (np.zeros((1, 2)), np.array([[0.5, 0.2]])):
        rate = outer_rates(sec7, 1.0, NoiseCoupling(qz), a)
        assert rate.r_c == pytest.approx(0.0, abs=1e-12)


def test_outer_rates_direct_determinant(sec7):
    # oracle: with q_z = 0 the cognitive rate is the 3x3 determinant
    # log2 det(I + 5 v v^T) with v the full second column of the stacked map
    a = OuterAllocation(q_p=np.diag([5.0, 0.0]), q_c=np.diag([0.0, 5.0]))
    rate = outer_rates(sec7, 1.0, NoiseCoupling(np.zeros((1, 2))), a)
    v = np.array([0.799, 0.9409, -0.9921])
    expected = 0.5 * math.log2(1.0 + 5.0 * float(v @ v))
    assert rate.r_c == pytest.approx(expected, abs=1e-10)
    assert rate.r_c == pytest.approx(1.8795662548433676, abs=1e-10)


def test_outer_rates_zero_allocation(sec7):
    a = OuterAllocation(q_p=np.zeros((2, 2)), q_c=np.zeros((2, 2)))
    rate = outer_rates(sec7, 1.0, NoiseCoupling(np.zeros((1, 2))), a)
    assert rate.r_p == 0.0 and rate.r_c == 0.0


def test_outer_rates_rejects_singular_coupling(sec7):
    a = OuterAllocation(q_p=np.zeros((2, 2)), q_c=np.zeros((2, 2)))
    with pytest.raises(SingularSigmaZ):
        outer_rates(sec7, 1.0, NoiseCoupling(np.array([[1.0, 0.0]])), a)


def test_outer_rates_budget(sec7):
    a = OuterAllocation(q_p=np.diag([9.0, 0.0]), q_c=np.diag([0.0, 2.0]))
    with pytest.raises(InfeasibleAllocation):
        outer_rates(sec7, 1.0, NoiseCoupling(np.zeros((1, 2))), a)


def test_partial_rates_examples(sec7):
    zero = partial_outer_rates(sec7, 1.0, np.zeros((2, 2)), [[0.0]])
    assert zero.r_p == 0.0 and zero.r_c == 0.0
    rc_only = partial_outer_rates(sec7, 1.0, np.zeros((2, 2)), [[10.0]])
    assert rc_only.r_c == pytest.approx(2.149898980469891, abs=1e-12)
    beam = partial_outer_rates(sec7, 1.0, np.full((2, 2), 5.0), [[0.0]])
    assert beam.r_p == pytest.approx(MAX_RP, abs=1e-12)
    assert beam.r_c == 0.0


def test_partial_mu_sum_large_mu(sec7, fast):
    res = mu_sum_partial_outer(sec7, 1.0, 1e6, fast)
    assert res.value / 1e6 == pytest.approx(FLIPPED_A1, abs=1e-6)
    assert partial_outer_max_rp(sec7, 1.0) == pytest.approx(FLIPPED_A1, abs=1e-12)


def test_partial_mu_sum_at_balanced_alpha(sec7, fast):
    # stationarity of (p_p + a p_c)(hpp^2 + hcp^2/a) at a = hcp/hpp for equal
    # budgets; there the bound meets the achievable peak exactly
    alpha = 0.799 / 1.4435
    res = mu_sum_partial_outer(sec7, alpha, 1e6, fast)
    assert res.value / 1e6 == pytest.approx(MAX_RP, abs=1e-6)


def test_partial_mu_sum_zero_power():
    ch = CognitiveChannel(
        h_pp=[[1.0]], h_pc=[[0.1], [0.1]], h_cp=[[0.5]],
        h_cc=[[1.0], [1.0]], p_p=1e-12, p_c=1e-12, real_mode=True,
    )
    res = mu_sum_partial_outer(ch, 1.0, 1.0, SolverSettings(starts=2, seed=0))
    assert res.value == pytest.approx(0.0, abs=1e-9)


def test_partial_mu_sum_matches_oracle(sec7, fast):
    for mu, alpha in ((0.0, 1.0), (1.0, 0.5), (2.0, 2.0)):
        solver = mu_sum_partial_outer(sec7, alpha, mu, fast).value
        oracle = grid_oracle(sec7, mu, 400, "partial_outer", alpha)
        assert solver == pytest.approx(oracle, abs=fast.gap)


def test_achievable_witness_maps_into_bound(sec7, fast):
    res = mu_sum_achievable(sec7, 1.5, fast)
    for alpha in (0.3, 1.0, 3.0):
        q_p, s_cc = partial_start_from_achievable(sec7, alpha, res.witness)
        mapped = partial_outer_rates(sec7, alpha, q_p, s_cc)
        assert mapped.r_p == pytest.approx(res.rate.r_p, abs=1e-10)
        assert mapped.r_c == pytest.approx(res.rate.r_c, abs=1e-10)


def test_inf_alpha_meets_achievable_peak(sec7):
    opts = SolverSettings(starts=4, seed=3)
    res = inf_alpha_partial_outer(sec7, 1e6, opts=opts)
    assert res.n_value / 1e6 == pytest.approx(MAX_RP, abs=1e-3)
    assert 0.4 < res.alpha_star < 0.7  # analytic minimizer is hcp/hpp = 0.5535
    assert not res.non_unimodal
    ach = mu_sum_achievable(sec7, 1e6, opts).value
    assert res.n_value >= ach - 1e-6


def test_inf_alpha_symmetric_channel():
    ch = CognitiveChannel(
        h_pp=[[1.0]], h_pc=[[0.1]], h_cp=[[1.0]], h_cc=[[1.0]],
        p_p=3.0, p_c=3.0, real_mode=True,
    )
    res = inf_alpha_partial_outer(ch, 1e6, opts=SolverSettings(starts=3, seed=5))
    assert res.alpha_star == pytest.approx(1.0, rel=0.05)


def test_inf_alpha_unattained_infimum_reports_unbounded(sec7):
    # at mu = 0 the bound's mu-sum decreases monotonically in alpha (the
    # cognitive rate sees the budget p_p/alpha + p_c), so the minimizer rides
    # the upper bracket edge through every widening
    from cograte.errors import BracketUnbounded

    with pytest.raises(BracketUnbounded):
        inf_alpha_partial_outer(
            sec7, 0.0, alpha_bracket=(0.5, 2.0), opts=SolverSettings(starts=2, seed=1),
            n_scan=8,
        )


def test_partial_bound_diverges_at_alpha_extremes(sec7, fast):
    mid = mu_sum_partial_outer(sec7, 0.5535, 1.0, fast).value
    lo = mu_sum_partial_outer(sec7, 1e-4, 1.0, fast).value
    hi = mu_sum_partial_outer(sec7, 1e4, 1.0, fast).value
    assert lo >= mid + 1.0
    assert hi >= mid + 1.0


def test_bc_mu_sum_degenerate_cognitive_channel(fast):
    ch = CognitiveChannel(
        h_pp=[[1.2]], h_pc=[[0.1]], h_cp=[[0.7]], h_cc=[[1e-12]],
        p_p=4.0, p_c=4.0, real_mode=True,
    )
    res = bc_mu_sum(ch, 1.0, 1e6, fast)
    wf = partial_outer_max_rp(ch, 1.0)
    assert res.value / 1e6 == pytest.approx(wf, abs=1e-6)


def test_bc_mu_sum_bundled_large_mu(sec7, fast):
    res = bc_mu_sum(sec7, 1.0, 1e6, fast)
    assert res.value / 1e6 == pytest.approx(FLIPPED_A1, abs=1e-6)


def test_bc_mu_sum_rejects_small_mu(sec7, fast):
    with pytest.raises(UnsupportedMu):
        bc_mu_sum(sec7, 1.0, 0.5, fast)
    with pytest.raises(UnsupportedMu):
        condition_check(sec7, 1.0, 0.5, 1e-3, fast)


def test_bc_mu_sum_scalar_degraded_grid_oracle():
    # with h_cp = 0 only (q_p)_11 and (q_c)_22 matter; 2-D grid as oracle
    ch = CognitiveChannel(
        h_pp=[[1.1]], h_pc=[[0.05]], h_cp=[[0.0]], h_cc=[[0.8]],
        p_p=3.0, p_c=3.0, real_mode=True,
    )
    res = bc_mu_sum(ch, 1.0, 1.0, SolverSettings(starts=8, seed=4))
    budget = ch.p_p + ch.p_c
    qp = np.linspace(0.0, budget, 600)[:, None]
    qc = np.linspace(0.0, budget, 600)[None, :]
    mask = qp + qc <= budget
    rp = 0.5 * np.log2(1.0 + 1.1**2 * qp) * np.ones_like(qc)
    rc = 0.5 * np.log2(1.0 + 0.8**2 * qc) * np.ones_like(qp)
    oracle = float(np.max(np.where(mask, rp + rc, -np.inf)))
    assert res.value == pytest.approx(oracle, abs=1e-2)


def test_bc_dominates_partial(sec7, fast):
    from cograte.outer import _embed_structured

    for alpha, mu in ((0.5, 1.0), (1.0, 2.0), (2.0, 1e3)):
        part = mu_sum_partial_outer(sec7, alpha, mu, fast)
        embed = (part.q_p, _embed_structured(sec7, part.sigma_cc))
        bc = bc_mu_sum(sec7, alpha, mu, fast, extra_starts=[embed])
        assert bc.value >= part.value - 1e-8


def test_condition_check_degenerate_true(fast):
    ch = CognitiveChannel(
        h_pp=[[1.2]], h_pc=[[0.1]], h_cp=[[0.7]], h_cc=[[1e-12]],
        p_p=4.0, p_c=4.0, real_mode=True,
    )
    assert condition_check(ch, 1.0, 1e6, 1e-3, fast)


def test_condition_check_bundled_at_alpha_star(sec7, fast):
    assert condition_check(sec7, 0.5535, 1e6, 1e-3, fast)


def test_condition_check_gap_fixture():
    opts = SolverSettings(starts=10, seed=7)
    part = mu_sum_partial_outer(GAP_CHANNEL, 1.0, 1.0, opts)
    oracle = grid_oracle(GAP_CHANNEL, 1.0, 4000, "partial_outer", 1.0)
    assert part.value == pytest.approx(oracle, abs=1e-4)
    bc = bc_mu_sum(GAP_CHANNEL, 1.0, 1.0, opts)
    assert bc.value - part.value > 0.3
    assert not condition_check(GAP_CHANNEL, 1.0, 1.0, 1e-3, opts)


def test_trace_outer_boundary_endpoint(sec7, fast):
    boundary = trace_outer_boundary(sec7, 1.0, [1e6], fast)
    assert boundary.points[0].rate.r_p == pytest.approx(FLIPPED_A1, abs=1e-6)
    assert boundary.points[0].rate.r_c == pytest.approx(0.0, abs=1e-8)
    assert boundary.metadata["alpha"] == 1.0


def test_trace_outer_boundary_dominates_region(sec7, fast):
    grid = np.geomspace(0.05, 50, 7)
    region = trace_boundary(sec7, grid, fast)
    for alpha in (0.25, 1.0, 4.0):
        bound = trace_outer_boundary(sec7, alpha, grid, fast, warm_boundary=region)
        for bp, rp in zip(bound.points, region.points):
            assert bp.mu == rp.mu
            assert bp.rate.mu_sum(bp.mu) >= rp.rate.mu_sum(rp.mu) - 1e-6


def test_containment_on_randomized_channels(rng):
    # the bound contains the region for every (alpha, mu), whatever the
    # channel; checked with the mapped witness so solver noise cannot flip it
    opts = SolverSettings(starts=4, seed=29)
    for _ in range(8):
        gains = rng.normal(0, 1.2, size=3)
        if min(abs(g) for g in gains) < 0.05:
            continue
        ch = CognitiveChannel(
            h_pp=[[gains[0]]], h_pc=[[0.1]], h_cp=[[gains[1]]],
            h_cc=[[gains[2]]], p_p=float(rng.uniform(1, 6)),
            p_c=float(rng.uniform(1, 6)), real_mode=True,
        )
        for mu in (0.0, 1.7):
            ach = mu_sum_achievable(ch, mu, opts)
            for alpha in (0.3, 1.0, 4.0):
                bound = mu_sum_partial_outer(
                    ch, alpha, mu, opts, extra_starts=[ach.witness]
                )
                assert bound.value >= ach.value - 1e-9


def test_outer_mu_sum_and_coupling_infimum(sec7):
    opts = SolverSettings(starts=3, seed=9, max_iters=400)
    val0, rate0, _ = mu_sum_outer(sec7, 1.0, NoiseCoupling(np.zeros((1, 2))), 2.0, opts)
    best, coupling = min_outer_mu_sum_over_coupling(
        sec7, 1.0, 2.0, opts, sweeps=2
    )
    assert best <= val0 + 1e-6
    assert np.linalg.svd(coupling.q_z, compute_uv=False)[0] <= 1.0


def test_coupling_infimum_never_below_partial(sec7):
    # the partial bound is the claimed infimum target; a coarse search must
    # stay above it (it optimizes the same mu-sum over a superset region)
    opts = SolverSettings(starts=3, seed=9, max_iters=400)
    part = mu_sum_partial_outer(sec7, 1.0, 2.0, opts).value
    best, _ = min_outer_mu_sum_over_coupling(sec7, 1.0, 2.0, opts, sweeps=1)
    assert best >= part - 1e-3


def test_outer_rc_at_zero_coupling_upper_bounds_coupling_grid(sec7):
    # fixed allocation, scan the coupling row over a grid: the infimum of the
    # cognitive rate never exceeds its zero-coupling value
    a = OuterAllocation(q_p=np.diag([5.0, 0.0]), q_c=np.diag([0.0, 5.0]))
    base = outer_rates(sec7, 1.0, NoiseCoupling(np.zeros((1, 2))), a).r_c
    values = []
    for u in np.linspace(-0.9, 0.9, 13):
        for v in np.linspace(-0.9, 0.9, 13):
            if math.hypot(u, v) >= 0.999:
                continue
            nz = NoiseCoupling(np.array([[u, v]]))
            values.append(outer_rates(sec7, 1.0, nz, a).r_c)
    assert min(values) <= base + 1e-12
    assert min(values) < base  # coupling strictly reduces it somewhere
