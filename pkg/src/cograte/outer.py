"""Outer bounds on the capacity region: full coupled-noise bound, partial
bound, broadcast-side mu-sums, the tightness condition, and the scalar
minimization over the alpha scaling.

The full bound evaluates rate pairs of the cooperative broadcast channel
with sum power ``p_p + alpha p_c`` and coupled noise (coupling ``q_z``); the
partial bound restricts the second user's covariance to the cognitive block,
which is enough for mu-sum comparisons against the achievable region.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass, replace

import numpy as np

from .achievable import DpcAllocation
from .channel import CognitiveChannel, composite_matrices
from .errors import (
    BracketUnbounded,
    InfeasibleAllocation,
    SingularSigmaZ,
    SolverDiverged,
    UnsupportedMu,
)
from .linalg import (
    DEFAULT_TOL,
    LN2,
    build_lower,
    encode_psd,
    log_det_id_plus,
    logdet2_pd,
    min_eigenvalue,
    param_len,
    symmetrize,
)
from .regions import RatePair, RegionBoundary, cross_polish
from .solvers import (
    ScanResult,
    SolverSettings,
    golden_section,
    make_group_projection,
    maximize_multistart,
    scan_then_golden,
    waterfill,
)


@dataclass(frozen=True)
class NoiseCoupling:
    """Cross-correlation q_z between the genie copy of the licensed noise and
    the cognitive noise; the stacked covariance [[I, q_z], [q_z†, I]] must
    stay PSD, i.e. all singular values of q_z are at most one."""

    q_z: np.ndarray

    def __post_init__(self):
        q = np.atleast_2d(np.asarray(self.q_z))
        object.__setattr__(self, "q_z", q)
        top = float(np.linalg.svd(q, compute_uv=False)[0]) if q.size else 0.0
        if top > 1.0 + 1e-9:
            raise SingularSigmaZ(
                f"q_z has singular value {top:.6g} > 1; coupled covariance not PSD"
            )

    def sigma_z(self) -> np.ndarray:
        n_pr, n_cr = self.q_z.shape
        top = np.hstack([np.eye(n_pr, dtype=self.q_z.dtype), self.q_z])
        bottom = np.hstack([np.conj(self.q_z.T), np.eye(n_cr, dtype=self.q_z.dtype)])
        return np.vstack([top, bottom])


@dataclass(frozen=True)
class OuterAllocation:
    """Broadcast-side covariances (q_p for the licensed message, q_c for the
    cognitive one), both over the stacked transmit dimensions."""

    q_p: np.ndarray
    q_c: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "q_p", np.atleast_2d(np.asarray(self.q_p)))
        object.__setattr__(self, "q_c", np.atleast_2d(np.asarray(self.q_c)))


def _check_budget(label: str, total: float, budget: float, tol: float):
    if total > budget + tol:
        raise InfeasibleAllocation(
            f"{label} = {total:.6g} exceeds sum budget {budget:.6g}"
        )


def _check_psd(label: str, m: np.ndarray, tol: float):
    e = min_eigenvalue(m)
    if e < -tol:
        raise InfeasibleAllocation(f"{label} is not PSD (min eigenvalue {e:.3e})")


def outer_rates(
    ch: CognitiveChannel,
    alpha: float,
    nz: NoiseCoupling,
    a: OuterAllocation,
    tol: float = DEFAULT_TOL,
) -> RatePair:
    """Rate pair of the full coupled-noise bound for one allocation.

    The licensed rate treats the cognitive covariance as interference over
    the scaled stacked channel; the cognitive rate is the log-det increment
    of the coupled noise covariance.
    """
    mats = composite_matrices(ch, alpha)
    sz = nz.sigma_z()
    if min_eigenvalue(sz) <= 1e-9:
        raise SingularSigmaZ("coupled noise covariance must be strictly positive definite")
    _check_psd("q_p", a.q_p, tol)
    _check_psd("q_c", a.q_c, tol)
    total = float(np.real(np.trace(a.q_p) + np.trace(a.q_c)))
    _check_budget("trace(q_p)+trace(q_c)", total, ch.p_p + alpha * ch.p_c, tol)

    s = ch.rate_scale
    ga = mats.g_alpha
    sig = ga @ a.q_p @ np.conj(ga.T)
    intf = ga @ a.q_c @ np.conj(ga.T)
    r_p = s * (log_det_id_plus(sig + intf) - log_det_id_plus(intf))
    bumped = sz + mats.k_bar @ a.q_c @ np.conj(mats.k_bar.T)
    r_c = s * (logdet2_pd(bumped) - logdet2_pd(sz))
    return RatePair(r_p=max(r_p, 0.0), r_c=max(r_c, 0.0))


def partial_outer_rates(
    ch: CognitiveChannel,
    alpha: float,
    q_p: np.ndarray,
    sigma_cc: np.ndarray,
    tol: float = DEFAULT_TOL,
) -> RatePair:
    """Rate pair of the partial bound, with the cognitive covariance
    restricted to its own block and scaled by 1/alpha."""
    mats = composite_matrices(ch, alpha)
    q_p = np.atleast_2d(np.asarray(q_p))
    sigma_cc = np.atleast_2d(np.asarray(sigma_cc))
    _check_psd("q_p", q_p, tol)
    _check_psd("sigma_cc", sigma_cc, tol)
    total = float(np.real(np.trace(q_p) + np.trace(sigma_cc)))
    _check_budget("trace(q_p)+trace(sigma_cc)", total, ch.p_p + alpha * ch.p_c, tol)

    s = ch.rate_scale
    ga = mats.g_alpha
    intf = (ch.h_cp @ sigma_cc @ np.conj(ch.h_cp.T)) / alpha
    sig = ga @ q_p @ np.conj(ga.T)
    r_p = s * (log_det_id_plus(sig + intf) - log_det_id_plus(intf))
    r_c = s * log_det_id_plus((ch.h_cc @ sigma_cc @ np.conj(ch.h_cc.T)) / alpha)
    return RatePair(r_p=max(r_p, 0.0), r_c=max(r_c, 0.0))


# ---------------------------------------------------------------------------
# mu-sum solvers over the bound regions
# ---------------------------------------------------------------------------


def _batched_logdet2(m: np.ndarray) -> np.ndarray:
    _sign, logabs = np.linalg.slogdet(m)
    return logabs / LN2


@dataclass(frozen=True)
class BoundMuSumResult:
    value: float
    rate: RatePair
    q_p: np.ndarray
    sigma_cc: np.ndarray
    theta: np.ndarray
    alpha: float


@dataclass(frozen=True)
class BcMuSumResult:
    value: float
    rate: RatePair
    q_p: np.ndarray
    q_c: np.ndarray
    alpha: float


def partial_start_from_achievable(
    ch: CognitiveChannel, alpha: float, a: DpcAllocation
) -> tuple[np.ndarray, np.ndarray]:
    """Map a feasible DPC allocation into the partial bound's variables.

    (q_p, sigma_cc) = ([[sigma_p, sqrt(a) q], [.., a sigma_cp]], a sigma_cc)
    reproduces the same rate pair inside the bound's constraint set, so a
    solved achievable witness is always a valid warm start here.
    """
    root = math.sqrt(alpha)
    top = np.hstack([a.sigma_p, root * a.q])
    bottom = np.hstack([root * np.conj(a.q.T), alpha * a.sigma_cp])
    return np.vstack([top, bottom]), alpha * a.sigma_cc


def _bound_corners(ch: CognitiveChannel, alpha: float, budget: float):
    """Deterministic corners: all power water-filled for r_p, all for r_c."""
    mats = composite_matrices(ch, alpha)
    n = ch.n_pt + ch.n_ct
    corners = []
    _, wf_qp = waterfill(mats.g_alpha, budget, real_mode=ch.real_mode)
    corners.append((wf_qp, np.zeros((ch.n_ct, ch.n_ct))))
    corners.append((np.zeros((n, n)), (budget / ch.n_ct) * np.eye(ch.n_ct)))
    corners.append(
        ((0.5 * budget / n) * np.eye(n), (0.5 * budget / ch.n_ct) * np.eye(ch.n_ct))
    )
    return corners


def mu_sum_partial_outer(
    ch: CognitiveChannel,
    alpha: float,
    mu: float,
    opts: SolverSettings | None = None,
    extra_starts=(),
) -> BoundMuSumResult:
    """Maximize mu*r_p + r_c over the partial bound at a fixed alpha.

    ``extra_starts`` accepts DPC allocations (mapped through
    :func:`partial_start_from_achievable`), (q_p, sigma_cc) pairs, or raw
    parameter vectors.
    """
    mu = float(mu)
    if not math.isfinite(mu) or mu < 0.0:
        raise ValueError(f"mu must be finite and nonnegative, got {mu}")
    opts = opts or SolverSettings()
    mats = composite_matrices(ch, alpha)
    cm = not ch.real_mode
    n = ch.n_pt + ch.n_ct
    k1 = param_len(n, cm)
    k2 = param_len(ch.n_ct, cm)
    budget = ch.p_p + alpha * ch.p_c
    s = ch.rate_scale
    ga = mats.g_alpha.astype(complex if cm else float)
    h_cp = ch.h_cp.astype(complex if cm else float)
    h_cc = ch.h_cc.astype(complex if cm else float)
    eye_pr = np.eye(ch.n_pr, dtype=ga.dtype)
    eye_cr = np.eye(ch.n_cr, dtype=ga.dtype)

    def objective(thetas: np.ndarray) -> np.ndarray:
        thetas = np.atleast_2d(thetas)
        l_qp = build_lower(thetas[:, :k1], n, cm)
        l_cc = build_lower(thetas[:, k1:], ch.n_ct, cm)
        q_p = l_qp @ np.conj(np.swapaxes(l_qp, -1, -2))
        s_cc = l_cc @ np.conj(np.swapaxes(l_cc, -1, -2))
        intf = (h_cp @ s_cc @ np.conj(h_cp.T)) / alpha
        sig = ga @ q_p @ np.conj(ga.T)
        r_p = s * (
            _batched_logdet2(eye_pr + sig + intf) - _batched_logdet2(eye_pr + intf)
        )
        r_c = s * _batched_logdet2(eye_cr + (h_cc @ s_cc @ np.conj(h_cc.T)) / alpha)
        return mu * r_p + r_c

    project = make_group_projection([(np.arange(k1 + k2), budget)])

    starts = []
    for q_p, s_cc in _bound_corners(ch, alpha, budget):
        starts.append(
            np.concatenate([encode_psd(q_p, complex_mode=cm), encode_psd(s_cc, complex_mode=cm)])
        )
    for item in extra_starts:
        if isinstance(item, DpcAllocation):
            q_p, s_cc = partial_start_from_achievable(ch, alpha, item)
            starts.append(
                np.concatenate(
                    [encode_psd(q_p, complex_mode=cm), encode_psd(s_cc, complex_mode=cm)]
                )
            )
        elif isinstance(item, tuple):
            q_p, s_cc = item
            starts.append(
                np.concatenate(
                    [encode_psd(q_p, complex_mode=cm), encode_psd(s_cc, complex_mode=cm)]
                )
            )
        else:
            starts.append(np.asarray(item, dtype=float))

    _, theta = maximize_multistart(
        objective, k1 + k2, project, opts, scale=math.sqrt(budget), extra_starts=starts
    )
    l_qp = build_lower(theta[:k1], n, cm)
    l_cc = build_lower(theta[k1:], ch.n_ct, cm)
    q_p = symmetrize(l_qp @ np.conj(l_qp.T))
    s_cc = symmetrize(l_cc @ np.conj(l_cc.T))
    rate = partial_outer_rates(ch, alpha, q_p, s_cc)
    return BoundMuSumResult(
        value=rate.mu_sum(mu), rate=rate, q_p=q_p, sigma_cc=s_cc, theta=theta, alpha=alpha
    )


def partial_outer_max_rp(ch: CognitiveChannel, alpha: float) -> float:
    """Largest licensed rate inside the partial bound at a given alpha.

    With all weight on r_p the bound is a single point-to-point link with the
    scaled stacked matrix under the sum budget, solved by water-filling.
    """
    mats = composite_matrices(ch, alpha)
    capacity, _ = waterfill(mats.g_alpha, ch.p_p + alpha * ch.p_c, real_mode=ch.real_mode)
    return capacity


@dataclass(frozen=True)
class InfAlphaResult:
    alpha_star: float
    n_value: float
    rate: RatePair
    q_p: np.ndarray
    sigma_cc: np.ndarray
    non_unimodal: bool
    bracket: tuple[float, float]


def inf_alpha_partial_outer(
    ch: CognitiveChannel,
    mu: float,
    alpha_bracket: tuple[float, float] = (1e-3, 1e3),
    opts: SolverSettings | None = None,
    n_scan: int = 20,
) -> InfAlphaResult:
    """Minimize the partial-bound mu-sum over the alpha scaling.

    A coarse log-spaced pre-scan guards the unimodality assumption (two local
    minima fall back to the scan minimum and set ``non_unimodal``); the
    bracket widens tenfold, up to three times per side, whenever the minimum
    touches an edge, mirroring the divergence of the objective at 0 and
    infinity.
    """
    lo, hi = float(alpha_bracket[0]), float(alpha_bracket[1])
    if not (0.0 < lo < hi < math.inf):
        raise ValueError(f"invalid alpha bracket ({lo}, {hi})")
    opts = opts or SolverSettings()
    # scan evaluations run with a trimmed budget (warm-chained along alpha);
    # only the final solve at the minimizer uses the full settings
    inner_opts = replace(
        opts,
        starts=max(2, opts.starts // 3),
        max_iters=min(opts.max_iters, 400),
    )

    cache: dict[float, BoundMuSumResult] = {}
    warm: list[np.ndarray] = []

    def n_of_alpha(log_a: float) -> float:
        a = math.exp(log_a)
        if a not in cache:
            res = mu_sum_partial_outer(ch, a, mu, inner_opts, extra_starts=list(warm[-1:]))
            cache[a] = res
            warm.append(res.theta)
        return cache[a].value

    result: ScanResult | None = None
    for _ in range(4):
        xs = np.log(np.geomspace(lo, hi, n_scan))
        result = scan_then_golden(n_of_alpha, xs, tol=1e-6)
        if result.flat or result.edge == 0:
            break
        if result.edge < 0:
            lo /= 10.0
        else:
            hi *= 10.0
    else:
        raise BracketUnbounded(
            f"alpha minimizer kept touching the bracket edge; last bracket ({lo:g}, {hi:g})"
        )

    alpha_star = math.exp(result.x)
    seed_theta = cache[alpha_star].theta if alpha_star in cache else None
    extra = [seed_theta] if seed_theta is not None else list(warm[-1:])
    best = mu_sum_partial_outer(ch, alpha_star, mu, opts, extra_starts=extra)
    return InfAlphaResult(
        alpha_star=alpha_star,
        n_value=best.value,
        rate=best.rate,
        q_p=best.q_p,
        sigma_cc=best.sigma_cc,
        non_unimodal=result.non_unimodal,
        bracket=(lo, hi),
    )


def bc_mu_sum(
    ch: CognitiveChannel,
    alpha: float,
    mu: float,
    opts: SolverSettings | None = None,
    extra_starts=(),
) -> BcMuSumResult:
    """Maximize mu*r_p + r_c over the licensed-first broadcast region with an
    unstructured cognitive covariance under the sum power budget.

    Requires mu >= 1: only there does the licensed-first ordering attain the
    broadcast-channel maximum.
    """
    mu = float(mu)
    if not math.isfinite(mu) or mu < 1.0:
        raise UnsupportedMu(f"broadcast-side mu-sums require mu >= 1, got {mu}")
    opts = opts or SolverSettings()
    mats = composite_matrices(ch, alpha)
    cm = not ch.real_mode
    n = ch.n_pt + ch.n_ct
    k1 = param_len(n, cm)
    budget = ch.p_p + alpha * ch.p_c
    s = ch.rate_scale
    ga = mats.g_alpha.astype(complex if cm else float)
    kk = mats.k.astype(complex if cm else float)
    eye_pr = np.eye(ch.n_pr, dtype=ga.dtype)
    eye_cr = np.eye(ch.n_cr, dtype=ga.dtype)

    def objective(thetas: np.ndarray) -> np.ndarray:
        thetas = np.atleast_2d(thetas)
        l_qp = build_lower(thetas[:, :k1], n, cm)
        l_qc = build_lower(thetas[:, k1:], n, cm)
        q_p = l_qp @ np.conj(np.swapaxes(l_qp, -1, -2))
        q_c = l_qc @ np.conj(np.swapaxes(l_qc, -1, -2))
        sig = ga @ q_p @ np.conj(ga.T)
        intf = ga @ q_c @ np.conj(ga.T)
        r_p = s * (
            _batched_logdet2(eye_pr + sig + intf) - _batched_logdet2(eye_pr + intf)
        )
        r_c = s * _batched_logdet2(eye_cr + kk @ q_c @ np.conj(kk.T))
        return mu * r_p + r_c

    project = make_group_projection([(np.arange(2 * k1), budget)])

    starts = []
    _, wf_qp = waterfill(ga, budget, real_mode=ch.real_mode)
    zero_n = np.zeros((n, n))
    starts.append(np.concatenate([encode_psd(wf_qp, cm), encode_psd(zero_n, cm)]))
    try:
        _, wf_qc = waterfill(kk, budget, real_mode=ch.real_mode)
        starts.append(np.concatenate([encode_psd(zero_n, cm), encode_psd(wf_qc, cm)]))
    except Exception:
        pass  # k may be all-zero (degenerate cognitive receiver)
    iso = (0.5 * budget / n) * np.eye(n)
    starts.append(np.concatenate([encode_psd(iso, cm), encode_psd(iso, cm)]))
    for item in extra_starts:
        if isinstance(item, tuple):
            q_p, q_c = item
            starts.append(np.concatenate([encode_psd(q_p, cm), encode_psd(q_c, cm)]))
        else:
            starts.append(np.asarray(item, dtype=float))

    _, theta = maximize_multistart(
        objective, 2 * k1, project, opts, scale=math.sqrt(budget), extra_starts=starts
    )
    l_qp = build_lower(theta[:k1], n, cm)
    l_qc = build_lower(theta[k1:], n, cm)
    q_p = symmetrize(l_qp @ np.conj(l_qp.T))
    q_c = symmetrize(l_qc @ np.conj(l_qc.T))
    sig = ga @ q_p @ np.conj(ga.T)
    intf = ga @ q_c @ np.conj(ga.T)
    r_p = s * (log_det_id_plus(sig + intf) - log_det_id_plus(intf))
    r_c = s * log_det_id_plus(kk @ q_c @ np.conj(kk.T))
    rate = RatePair(r_p=max(r_p, 0.0), r_c=max(r_c, 0.0))
    return BcMuSumResult(value=rate.mu_sum(mu), rate=rate, q_p=q_p, q_c=q_c, alpha=alpha)


def _embed_structured(ch: CognitiveChannel, sigma_cc: np.ndarray) -> np.ndarray:
    n = ch.n_pt + ch.n_ct
    q_c = np.zeros((n, n), dtype=np.asarray(sigma_cc).dtype)
    q_c[ch.n_pt :, ch.n_pt :] = sigma_cc
    return q_c


def condition_check(
    ch: CognitiveChannel,
    alpha: float,
    mu: float,
    tol: float,
    opts: SolverSettings | None = None,
) -> bool:
    """Tightness condition: the structured cognitive covariance loses nothing.

    Compares the partial-bound mu-sum against the broadcast-side mu-sum with
    unstructured covariance; equality within ``tol`` certifies that the
    partial bound meets the full coupled-noise bound for this (alpha, mu).
    """
    if tol <= 0.0:
        raise ValueError("tol must be positive")
    mu = float(mu)
    if not math.isfinite(mu) or mu < 1.0:
        raise UnsupportedMu(f"condition check requires mu >= 1, got {mu}")
    opts = opts or SolverSettings()
    part = mu_sum_partial_outer(ch, alpha, mu, opts)
    embed = (part.q_p, _embed_structured(ch, part.sigma_cc))
    bc = bc_mu_sum(ch, alpha, mu, opts, extra_starts=[embed])
    return abs(part.value - bc.value) <= tol


def trace_outer_boundary(
    ch: CognitiveChannel,
    alpha: float,
    mu_grid,
    opts: SolverSettings | None = None,
    warm_boundary: RegionBoundary | None = None,
) -> RegionBoundary:
    """Trace the partial bound's boundary over a mu grid at one alpha.

    ``warm_boundary`` (typically the achievable boundary over the same grid)
    contributes mapped warm starts, which keeps the traced bound numerically
    above the region it contains even where the two curves touch.
    """
    mus = sorted({float(m) for m in mu_grid}, reverse=True)
    if not mus:
        raise ValueError("mu_grid must be nonempty")
    if any(not math.isfinite(m) or m < 0 for m in mus):
        raise ValueError("mu grid values must be finite and nonnegative")
    opts = opts or SolverSettings()

    warm_by_mu = {}
    if warm_boundary is not None:
        for p in warm_boundary.points:
            w = p.witness
            if all(k in w for k in ("sigma_p", "sigma_cp", "sigma_cc", "q")):
                warm_by_mu[float(p.mu)] = DpcAllocation(
                    sigma_p=np.asarray(w["sigma_p"]),
                    sigma_cp=np.asarray(w["sigma_cp"]),
                    sigma_cc=np.asarray(w["sigma_cc"]),
                    q=np.asarray(w["q"]),
                )

    rates, wits = [], []
    warm_theta = None
    for mu in mus:
        extra = []
        if warm_theta is not None:
            extra.append(warm_theta)
        if mu in warm_by_mu:
            extra.append(warm_by_mu[mu])
        try:
            res = mu_sum_partial_outer(ch, alpha, mu, opts, extra_starts=extra)
        except SolverDiverged as exc:
            raise SolverDiverged(f"{exc} (at mu={mu:g}, alpha={alpha:g})") from exc
        rates.append(res.rate)
        wits.append({"q_p": res.q_p, "sigma_cc": res.sigma_cc})
        warm_theta = res.theta
    points = cross_polish(mus, rates, wits)
    return RegionBoundary(
        points=points,
        metadata={
            "kind": "partial_outer",
            "alpha": alpha,
            "channel": ch.digest(),
            "settings": asdict(opts),
        },
    )


# ---------------------------------------------------------------------------
# full bound: mu-sum at fixed coupling, and the infimum over couplings
# ---------------------------------------------------------------------------


def mu_sum_outer(
    ch: CognitiveChannel,
    alpha: float,
    nz: NoiseCoupling,
    mu: float,
    opts: SolverSettings | None = None,
    extra_starts=(),
):
    """Maximize mu*r_p + r_c over the full bound at fixed (alpha, coupling)."""
    mu = float(mu)
    if not math.isfinite(mu) or mu < 0.0:
        raise ValueError(f"mu must be finite and nonnegative, got {mu}")
    opts = opts or SolverSettings()
    mats = composite_matrices(ch, alpha)
    sz = nz.sigma_z()
    if min_eigenvalue(sz) <= 1e-9:
        raise SingularSigmaZ("coupled noise covariance must be strictly positive definite")
    cm = not ch.real_mode
    n = ch.n_pt + ch.n_ct
    k1 = param_len(n, cm)
    budget = ch.p_p + alpha * ch.p_c
    s = ch.rate_scale
    ga = mats.g_alpha.astype(complex if cm else float)
    kbar = mats.k_bar.astype(complex if cm else float)
    sz = sz.astype(complex if cm else float)
    eye_pr = np.eye(ch.n_pr, dtype=ga.dtype)
    logdet_sz = logdet2_pd(sz)

    def objective(thetas: np.ndarray) -> np.ndarray:
        thetas = np.atleast_2d(thetas)
        l_qp = build_lower(thetas[:, :k1], n, cm)
        l_qc = build_lower(thetas[:, k1:], n, cm)
        q_p = l_qp @ np.conj(np.swapaxes(l_qp, -1, -2))
        q_c = l_qc @ np.conj(np.swapaxes(l_qc, -1, -2))
        sig = ga @ q_p @ np.conj(ga.T)
        intf = ga @ q_c @ np.conj(ga.T)
        r_p = s * (
            _batched_logdet2(eye_pr + sig + intf) - _batched_logdet2(eye_pr + intf)
        )
        r_c = s * (_batched_logdet2(sz + kbar @ q_c @ np.conj(kbar.T)) - logdet_sz)
        return mu * r_p + r_c

    project = make_group_projection([(np.arange(2 * k1), budget)])
    starts = []
    _, wf_qp = waterfill(ga, budget, real_mode=ch.real_mode)
    zero_n = np.zeros((n, n))
    starts.append(np.concatenate([encode_psd(wf_qp, cm), encode_psd(zero_n, cm)]))
    starts.append(
        np.concatenate(
            [encode_psd(zero_n, cm), encode_psd((budget / n) * np.eye(n), cm)]
        )
    )
    for item in extra_starts:
        if isinstance(item, tuple):
            q_p, q_c = item
            starts.append(np.concatenate([encode_psd(q_p, cm), encode_psd(q_c, cm)]))
        else:
            starts.append(np.asarray(item, dtype=float))

    value, theta = maximize_multistart(
        objective, 2 * k1, project, opts, scale=math.sqrt(budget), extra_starts=starts
    )
    l_qp = build_lower(theta[:k1], n, cm)
    l_qc = build_lower(theta[k1:], n, cm)
    alloc = OuterAllocation(
        q_p=symmetrize(l_qp @ np.conj(l_qp.T)), q_c=symmetrize(l_qc @ np.conj(l_qc.T))
    )
    rate = outer_rates(ch, alpha, nz, alloc)
    return rate.mu_sum(mu), rate, alloc


def min_outer_mu_sum_over_coupling(
    ch: CognitiveChannel,
    alpha: float,
    mu: float,
    opts: SolverSettings | None = None,
    margin: float = 1e-6,
    sweeps: int = 6,
    rel_tol: float = 1e-6,
):
    """Infimum over noise couplings of the full-bound mu-sum.

    Coordinate descent over the entries of q_z (golden section per entry,
    candidates clipped back whenever the coupled covariance would lose strict
    definiteness by less than ``margin``); each evaluation re-maximizes over
    the transmit covariances.  Returns (value, coupling).
    """
    opts = opts or SolverSettings()
    shape = (ch.n_pr, ch.n_cr)
    q = np.zeros(shape)

    def clipped(qc: np.ndarray) -> np.ndarray:
        top = float(np.linalg.svd(qc, compute_uv=False)[0]) if qc.size else 0.0
        limit = 1.0 - margin
        if top > limit:
            qc = qc * (limit / top)
        return qc

    def evaluate(qc: np.ndarray) -> float:
        value, _, _ = mu_sum_outer(ch, alpha, NoiseCoupling(qc), mu, opts)
        return value

    best = evaluate(q)
    for _ in range(sweeps):
        improved = False
        for i in range(shape[0]):
            for j in range(shape[1]):
                def per_entry(t: float) -> float:
                    cand = q.copy()
                    cand[i, j] = t
                    return evaluate(clipped(cand))

                t_star, val = golden_section(per_entry, -1.0 + margin, 1.0 - margin, tol=1e-3)
                if val < best - rel_tol * (1.0 + abs(best)):
                    cand = q.copy()
                    cand[i, j] = t_star
                    q = clipped(cand)
                    best = val
                    improved = True
        if not improved:
            break
    return best, NoiseCoupling(q)
