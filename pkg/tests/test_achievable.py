import math

import numpy as np
import pytest

from cograte.achievable import (
    DpcAllocation,
    dpc_rate_caps,
    dpc_rates,
    is_feasible,
    mu_sum_achievable,
    trace_boundary,
)
from cograte.channel import CognitiveChannel, mc_mutual_info
from cograte.errors import InfeasibleAllocation
from cograte.linalg import log_det_id_plus
from cograte.oracles import grid_oracle
from cograte.solvers import SolverSettings

# frozen from the direct scalar evaluation of the two log-det formulas
MAX_RP = 2.354204853970093
RC_FULL = 1.6856244190235852
RP_MIXED = 0.9006449377402712


def scalar_alloc(sp, scp, scc, q):
    return DpcAllocation([[sp]], [[scp]], [[scc]], [[q]])


def test_dpc_rates_full_cooperation(sec7):
    rate = dpc_rates(sec7, scalar_alloc(5.0, 5.0, 0.0, 5.0))
    assert rate.r_p == pytest.approx(MAX_RP, abs=1e-12)
    assert rate.r_c == 0.0


def test_dpc_rates_zero_allocation(sec7):
    rate = dpc_rates(sec7, scalar_alloc(0.0, 0.0, 0.0, 0.0))
    assert rate.r_p == 0.0 and rate.r_c == 0.0


def test_dpc_rates_split(sec7):
    rate = dpc_rates(sec7, scalar_alloc(5.0, 0.0, 5.0, 0.0))
    assert rate.r_p == pytest.approx(RP_MIXED, abs=1e-12)
    assert rate.r_c == pytest.approx(RC_FULL, abs=1e-12)


def test_dpc_rates_names_violated_constraint(sec7):
    with pytest.raises(InfeasibleAllocation, match="licensed budget"):
        dpc_rates(sec7, scalar_alloc(6.0, 0.0, 0.0, 0.0))
    with pytest.raises(InfeasibleAllocation, match="cognitive budget"):
        dpc_rates(sec7, scalar_alloc(5.0, 5.0, 1.0, 0.0))
    with pytest.raises(InfeasibleAllocation, match="not PSD"):
        dpc_rates(sec7, scalar_alloc(1.0, 1.0, 0.0, 1.5))


def test_is_feasible_examples(sec7):
    assert is_feasible(sec7, scalar_alloc(0.0, 0.0, 0.0, 0.0))
    assert not is_feasible(sec7, scalar_alloc(5.0, 5.0, 1.0, 0.0))
    # the stacked block [[1, 1.5], [1.5, 1]] has eigenvalue -0.5
    assert not is_feasible(sec7, scalar_alloc(1.0, 1.0, 0.0, 1.5))


def test_rate_caps_ignore_budgets(sec7):
    rate = dpc_rate_caps(sec7, scalar_alloc(50.0, 0.0, 0.0, 0.0))
    assert rate.r_p > MAX_RP


def test_mu_sum_large_mu_hits_peak(sec7, fast):
    res = mu_sum_achievable(sec7, 1e6, fast)
    assert res.rate.r_p == pytest.approx(MAX_RP, abs=1e-6)
    assert res.rate.r_c == pytest.approx(0.0, abs=1e-9)
    assert res.value == pytest.approx(1e6 * res.rate.r_p + res.rate.r_c)
    assert is_feasible(sec7, res.witness, tol=1e-8)


def test_mu_sum_zero_mu_maximizes_cognitive_rate(sec7, fast):
    res = mu_sum_achievable(sec7, 0.0, fast)
    assert res.rate.r_c == pytest.approx(RC_FULL, abs=1e-8)


def test_mu_sum_vanishing_power():
    ch = CognitiveChannel(
        h_pp=[[1.4435]], h_pc=[[-0.351], [0.6232]], h_cp=[[0.799]],
        h_cc=[[0.9409], [-0.9921]], p_p=1e-12, p_c=1e-12, real_mode=True,
    )
    res = mu_sum_achievable(ch, 1.0, SolverSettings(starts=2, seed=0))
    assert res.value == pytest.approx(0.0, abs=1e-9)


def test_mu_sum_rejects_bad_mu(sec7, fast):
    with pytest.raises(ValueError):
        mu_sum_achievable(sec7, -1.0, fast)
    with pytest.raises(ValueError):
        mu_sum_achievable(sec7, math.inf, fast)


def test_mu_sum_matches_oracle(sec7, fast):
    for mu in (0.0, 1.0):
        solver = mu_sum_achievable(sec7, mu, fast).value
        oracle = grid_oracle(sec7, mu, 400)
        assert solver == pytest.approx(oracle, abs=fast.gap)


def test_power_monotonicity(rng):
    for _ in range(5):
        gains = rng.standard_normal(3)
        base = CognitiveChannel(
            h_pp=[[gains[0]]], h_pc=[[0.2]], h_cp=[[gains[1]]],
            h_cc=[[gains[2]]], p_p=2.0, p_c=2.0, real_mode=True,
        )
        richer = CognitiveChannel(
            h_pp=[[gains[0]]], h_pc=[[0.2]], h_cp=[[gains[1]]],
            h_cc=[[gains[2]]], p_p=2.0, p_c=4.0, real_mode=True,
        )
        opts = SolverSettings(starts=4, seed=13)
        for mu in (0.5, 2.0):
            low = mu_sum_achievable(base, mu, opts).value
            high = mu_sum_achievable(richer, mu, opts).value
            assert high >= low - 1e-8


def test_decoupled_channel_rate(sec7):
    ch = CognitiveChannel(
        h_pp=[[1.1]], h_pc=[[0.3], [0.1]], h_cp=[[0.0]],
        h_cc=[[0.9], [-0.5]], p_p=4.0, p_c=3.0, real_mode=True,
    )
    for scc in (0.0, 1.0, 3.0):
        rate = dpc_rates(ch, scalar_alloc(4.0, 0.0, scc, 0.0))
        expected = 0.5 * log_det_id_plus(4.0 * ch.h_pp @ ch.h_pp.T)
        assert rate.r_p == pytest.approx(expected, abs=1e-12)


def test_cognitive_rate_ignores_licensed_side(sec7):
    base = dpc_rates(sec7, scalar_alloc(1.0, 2.0, 2.0, 0.5)).r_c
    for sp, q in ((0.0, 0.0), (5.0, 0.0), (2.0, -1.0)):
        assert dpc_rates(sec7, scalar_alloc(sp, 2.0, 2.0, q)).r_c == pytest.approx(
            base, abs=1e-12
        )


def test_cognitive_rate_cross_checked_by_monte_carlo(sec7):
    rate = dpc_rates(sec7, scalar_alloc(0.0, 0.0, 4.0, 0.0))
    est = mc_mutual_info(
        sec7.h_cc, np.array([[4.0]]), np.eye(2), 10**6, seed=21, real_mode=True
    )
    assert est == pytest.approx(rate.r_c, abs=0.02)


def test_trace_boundary_single_points(sec7, fast):
    top = trace_boundary(sec7, [1e6], fast)
    assert top.points[0].rate.r_p == pytest.approx(MAX_RP, abs=1e-6)
    bottom = trace_boundary(sec7, [0.0], fast)
    assert bottom.points[0].rate.r_c == pytest.approx(RC_FULL, abs=1e-8)


def test_trace_boundary_pareto_order(sec7, fast):
    boundary = trace_boundary(sec7, np.geomspace(0.05, 50, 9), fast)
    mus = [p.mu for p in boundary.points]
    assert mus == sorted(mus, reverse=True)
    rps = [p.rate.r_p for p in boundary.points]
    rcs = [p.rate.r_c for p in boundary.points]
    assert all(a >= b - 1e-9 for a, b in zip(rps, rps[1:]))
    assert all(a <= b + 1e-9 for a, b in zip(rcs, rcs[1:]))
    assert boundary.metadata["channel"] == sec7.digest()


def test_trace_boundary_zero_power_channel():
    ch = CognitiveChannel(
        h_pp=[[1.0]], h_pc=[[0.1], [0.1]], h_cp=[[0.5]],
        h_cc=[[1.0], [1.0]], p_p=1e-12, p_c=1e-12, real_mode=True,
    )
    boundary = trace_boundary(ch, [0.1, 1.0, 10.0], SolverSettings(starts=2, seed=0))
    for p in boundary.points:
        assert p.rate.r_p <= 1e-9 and p.rate.r_c <= 1e-9


def test_trace_boundary_deterministic(sec7):
    opts = SolverSettings(starts=4, seed=7)
    a = trace_boundary(sec7, [0.1, 1.0, 10.0], opts)
    b = trace_boundary(sec7, [0.1, 1.0, 10.0], opts)
    assert a.to_csv() == b.to_csv()


def test_trace_boundary_consistent_with_direct_solves(sec7, fast):
    # warm chaining and pooled rescoring may only help: every traced point
    # scores at least what an independent cold solve of the same mu finds
    grid = [0.2, 2.0, 20.0]
    boundary = trace_boundary(sec7, grid, fast)
    by_mu = {p.mu: p for p in boundary.points}
    for mu in grid:
        direct = mu_sum_achievable(sec7, mu, fast)
        assert by_mu[mu].rate.mu_sum(mu) >= direct.value - 1e-9


def test_boundary_csv_shape(sec7, fast):
    boundary = trace_boundary(sec7, [1.0, 2.0], fast)
    lines = boundary.to_csv().strip().splitlines()
    assert lines[0] == "mu,r_p,r_c"
    assert len(lines) == 3
