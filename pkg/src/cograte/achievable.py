"""Dirty-paper-coding achievable region: rate evaluation, feasibility,
mu-sum optimization and boundary tracing.

An allocation splits the cognitive power between helping the licensed
message (``sigma_cp``, correlated with the licensed codeword through ``q``)
and carrying the cognitive message (``sigma_cc``, precoded against the known
interference so the cognitive rate sees none of it).  The licensed receiver
treats the precoded part as noise.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass

import numpy as np

from .channel import CognitiveChannel
from .errors import InfeasibleAllocation, SolverDiverged
from .linalg import (
    DEFAULT_TOL,
    LN2,
    build_lower,
    encode_psd,
    log_det_id_plus,
    min_eigenvalue,
    param_len,
    param_rows,
    symmetrize,
)
from .regions import RatePair, RegionBoundary, cross_polish
from .solvers import SolverSettings, make_group_projection, maximize_multistart


@dataclass(frozen=True)
class DpcAllocation:
    """Covariance split (sigma_p, sigma_cp, sigma_cc, q) of one DPC scheme.

    ``q`` is the cross-correlation block between the licensed codeword and
    the cognitive helping codeword; the stacked block matrix
    [[sigma_p, q], [q†, sigma_cp]] must be PSD and the traces must respect
    the two power budgets.
    """

    sigma_p: np.ndarray
    sigma_cp: np.ndarray
    sigma_cc: np.ndarray
    q: np.ndarray

    def __post_init__(self):
        for name in ("sigma_p", "sigma_cp", "sigma_cc", "q"):
            object.__setattr__(self, name, np.atleast_2d(np.asarray(getattr(self, name))))

    @property
    def sigma_p_net(self) -> np.ndarray:
        top = np.hstack([self.sigma_p, self.q])
        bottom = np.hstack([np.conj(self.q.T), self.sigma_cp])
        return np.vstack([top, bottom])


def _feasibility_violation(ch: CognitiveChannel, a: DpcAllocation, tol: float):
    """Return a message naming the first violated constraint, or None."""
    if a.sigma_p.shape != (ch.n_pt, ch.n_pt):
        return f"sigma_p has shape {a.sigma_p.shape}, expected {(ch.n_pt, ch.n_pt)}"
    if a.sigma_cp.shape != (ch.n_ct, ch.n_ct) or a.sigma_cc.shape != (ch.n_ct, ch.n_ct):
        return "sigma_cp/sigma_cc shape inconsistent with the cognitive antenna count"
    if a.q.shape != (ch.n_pt, ch.n_ct):
        return f"q has shape {a.q.shape}, expected {(ch.n_pt, ch.n_ct)}"
    net_min = min_eigenvalue(a.sigma_p_net)
    if net_min < -tol:
        return f"stacked covariance block is not PSD (min eigenvalue {net_min:.3e})"
    cc_min = min_eigenvalue(a.sigma_cc)
    if cc_min < -tol:
        return f"sigma_cc is not PSD (min eigenvalue {cc_min:.3e})"
    tr_p = float(np.real(np.trace(a.sigma_p)))
    if tr_p > ch.p_p + tol:
        return f"trace(sigma_p) = {tr_p:.6g} exceeds licensed budget {ch.p_p:g}"
    tr_c = float(np.real(np.trace(a.sigma_cp) + np.trace(a.sigma_cc)))
    if tr_c > ch.p_c + tol:
        return f"trace(sigma_cp)+trace(sigma_cc) = {tr_c:.6g} exceeds cognitive budget {ch.p_c:g}"
    return None


def is_feasible(ch: CognitiveChannel, a: DpcAllocation, tol: float = DEFAULT_TOL) -> bool:
    """True iff the block-PSD and both trace constraints hold within tol."""
    if tol < 0:
        raise ValueError("tol must be nonnegative")
    return _feasibility_violation(ch, a, tol) is None


def dpc_rate_caps(ch: CognitiveChannel, a: DpcAllocation) -> RatePair:
    """Rate caps of an allocation, ignoring the power budgets.

    The Lagrangian case analysis evaluates allocations whose traces violate
    the budgets on purpose; only the PSD structure is required for the
    log-dets to make sense.
    """
    g = np.hstack([ch.h_pp, ch.h_cp])
    s = ch.rate_scale
    interference = ch.h_cp @ a.sigma_cc @ np.conj(ch.h_cp.T)
    signal = g @ a.sigma_p_net @ np.conj(g.T)
    r_p = s * (log_det_id_plus(signal + interference) - log_det_id_plus(interference))
    r_c = s * log_det_id_plus(ch.h_cc @ a.sigma_cc @ np.conj(ch.h_cc.T))
    return RatePair(r_p=max(r_p, 0.0), r_c=max(r_c, 0.0))


def dpc_rates(ch: CognitiveChannel, a: DpcAllocation, tol: float = DEFAULT_TOL) -> RatePair:
    """Maximal rate pair of the DPC scheme for one feasible allocation.

    The licensed rate is the log-det difference with the precoded cognitive
    signal acting as noise; the cognitive rate is interference-free.  Real
    mode halves both.
    """
    violation = _feasibility_violation(ch, a, tol)
    if violation is not None:
        raise InfeasibleAllocation(violation)
    return dpc_rate_caps(ch, a)


def scale_allocation(a: DpcAllocation, alpha: float) -> DpcAllocation:
    """Map an allocation onto the alpha-scaled channel.

    (sigma_cp, sigma_cc, q) -> (alpha sigma_cp, alpha sigma_cc, sqrt(alpha) q)
    keeps the rate pair exactly invariant under ``scaled_channel``.
    """
    root = math.sqrt(alpha)
    return DpcAllocation(
        sigma_p=a.sigma_p,
        sigma_cp=alpha * a.sigma_cp,
        sigma_cc=alpha * a.sigma_cc,
        q=root * a.q,
    )


# ---------------------------------------------------------------------------
# mu-sum optimization
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class MuSumResult:
    value: float
    rate: RatePair
    witness: DpcAllocation
    theta: np.ndarray


def _batched_logdet2(m: np.ndarray) -> np.ndarray:
    sign, logabs = np.linalg.slogdet(m)
    return logabs / LN2


def _layout(ch: CognitiveChannel):
    cm = not ch.real_mode
    n = ch.n_pt + ch.n_ct
    k1 = param_len(n, cm)
    k2 = param_len(ch.n_ct, cm)
    rows = param_rows(n, cm)
    licensed = np.nonzero(rows < ch.n_pt)[0]
    cognitive = np.concatenate([np.nonzero(rows >= ch.n_pt)[0], k1 + np.arange(k2)])
    return cm, n, k1, k2, licensed, cognitive


def _make_objective(ch: CognitiveChannel, mu: float):
    cm, n, k1, _k2, _, _ = _layout(ch)
    g = np.hstack([ch.h_pp, ch.h_cp]).astype(complex if cm else float)
    h_cp = ch.h_cp.astype(complex if cm else float)
    h_cc = ch.h_cc.astype(complex if cm else float)
    eye_pr = np.eye(ch.n_pr, dtype=g.dtype)
    eye_cr = np.eye(ch.n_cr, dtype=g.dtype)
    s = ch.rate_scale

    def objective(thetas: np.ndarray) -> np.ndarray:
        thetas = np.atleast_2d(thetas)
        l_net = build_lower(thetas[:, :k1], n, cm)
        l_cc = build_lower(thetas[:, k1:], ch.n_ct, cm)
        s_net = l_net @ np.conj(np.swapaxes(l_net, -1, -2))
        s_cc = l_cc @ np.conj(np.swapaxes(l_cc, -1, -2))
        interference = h_cp @ s_cc @ np.conj(h_cp.T)
        signal = g @ s_net @ np.conj(g.T)
        r_p = s * (
            _batched_logdet2(eye_pr + signal + interference)
            - _batched_logdet2(eye_pr + interference)
        )
        r_c = s * _batched_logdet2(eye_cr + h_cc @ s_cc @ np.conj(h_cc.T))
        return mu * r_p + r_c

    return objective


def _theta_to_allocation(ch: CognitiveChannel, theta: np.ndarray) -> DpcAllocation:
    cm, n, k1, _k2, _, _ = _layout(ch)
    l_net = build_lower(theta[:k1], n, cm)
    l_cc = build_lower(theta[k1:], ch.n_ct, cm)
    s_net = symmetrize(l_net @ np.conj(l_net.T))
    s_cc = symmetrize(l_cc @ np.conj(l_cc.T))
    npt = ch.n_pt
    return DpcAllocation(
        sigma_p=s_net[:npt, :npt],
        sigma_cp=s_net[npt:, npt:],
        sigma_cc=s_cc,
        q=s_net[:npt, npt:],
    )


def allocation_to_theta(ch: CognitiveChannel, a: DpcAllocation) -> np.ndarray:
    """Encode an allocation as a solver parameter vector (for warm starts)."""
    cm = not ch.real_mode
    return np.concatenate(
        [encode_psd(a.sigma_p_net, complex_mode=cm), encode_psd(a.sigma_cc, complex_mode=cm)]
    )


def _corner_allocations(ch: CognitiveChannel):
    """Deterministic start candidates: power corners of the feasible set."""
    npt, nct = ch.n_pt, ch.n_ct
    zp = np.zeros((npt, npt))
    zc = np.zeros((nct, nct))
    zq = np.zeros((npt, nct))
    iso_p = (ch.p_p / npt) * np.eye(npt)
    iso_c = (ch.p_c / nct) * np.eye(nct)
    corners = [
        DpcAllocation(iso_p, zc, zc, zq),
        DpcAllocation(iso_p, iso_c, zc, zq),
        DpcAllocation(iso_p, zc, iso_c, zq),
        DpcAllocation(iso_p, 0.5 * iso_c, 0.5 * iso_c, zq),
        DpcAllocation(zp, zc, iso_c, zq),
    ]
    if npt == 1 and nct == 1:
        # full-correlation beamforming corners of the scalar block
        r = math.sqrt(ch.p_p * ch.p_c)
        for sign in (1.0, -1.0):
            corners.append(
                DpcAllocation(
                    np.array([[ch.p_p]]),
                    np.array([[ch.p_c]]),
                    zc,
                    np.array([[sign * r]]),
                )
            )
    return corners


def _validate_mu(mu: float) -> float:
    mu = float(mu)
    if not math.isfinite(mu) or mu < 0.0:
        raise ValueError(f"mu must be finite and nonnegative, got {mu}")
    return mu


def mu_sum_achievable(
    ch: CognitiveChannel,
    mu: float,
    opts: SolverSettings | None = None,
    extra_starts=(),
) -> MuSumResult:
    """Maximize mu*r_p + r_c over feasible DPC allocations.

    Multi-start projected gradient ascent over Cholesky parameters of the
    stacked covariance block and sigma_cc; block-PSD holds by construction
    and the two trace budgets are enforced by exact group projection.
    ``extra_starts`` may carry allocations or raw parameter vectors.
    """
    mu = _validate_mu(mu)
    opts = opts or SolverSettings()
    cm, n, k1, k2, licensed, cognitive = _layout(ch)
    objective = _make_objective(ch, mu)
    project = make_group_projection([(licensed, ch.p_p), (cognitive, ch.p_c)])

    starts = [allocation_to_theta(ch, a) for a in _corner_allocations(ch)]
    for item in extra_starts:
        if isinstance(item, DpcAllocation):
            starts.append(allocation_to_theta(ch, item))
        else:
            starts.append(np.asarray(item, dtype=float))

    scale = math.sqrt(max(ch.p_p, ch.p_c))
    _, theta = maximize_multistart(
        objective, k1 + k2, project, opts, scale=scale, extra_starts=starts
    )
    witness = _theta_to_allocation(ch, theta)
    rate = dpc_rates(ch, witness)
    return MuSumResult(value=rate.mu_sum(mu), rate=rate, witness=witness, theta=theta)


def trace_boundary(
    ch: CognitiveChannel,
    mu_grid,
    opts: SolverSettings | None = None,
) -> RegionBoundary:
    """Trace the achievable boundary over a grid of mu weights.

    Solves largest mu first, warm-starting each solve from the previous
    witness, then rescores every mu against the pooled witnesses so the
    emitted points are exactly Pareto ordered (dominated solves never win).
    """
    mus = [_validate_mu(m) for m in mu_grid]
    if not mus:
        raise ValueError("mu_grid must be nonempty")
    opts = opts or SolverSettings()
    order = sorted(range(len(mus)), key=lambda i: -mus[i])
    rates, witnesses = {}, {}
    warm = None
    for i in order:
        extra = [warm] if warm is not None else []
        try:
            res = mu_sum_achievable(ch, mus[i], opts, extra_starts=extra)
        except SolverDiverged as exc:
            raise SolverDiverged(f"{exc} (at mu={mus[i]:g})") from exc
        rates[i] = res.rate
        witnesses[i] = res.witness
        warm = res.theta
    sorted_mus = sorted(mus, reverse=True)
    pool_rates = [rates[i] for i in order]
    pool_wits = [_witness_dict(witnesses[i]) for i in order]
    points = cross_polish(sorted_mus, pool_rates, pool_wits)
    return RegionBoundary(
        points=points,
        metadata={
            "kind": "achievable",
            "channel": ch.digest(),
            "settings": asdict(opts),
        },
    )


def _witness_dict(a: DpcAllocation) -> dict:
    return {
        "sigma_p": a.sigma_p,
        "sigma_cp": a.sigma_cp,
        "sigma_cc": a.sigma_cc,
        "q": a.q,
    }
