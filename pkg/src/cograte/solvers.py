"""Shared constrained-optimization machinery.

The rate-region solvers all reduce to maximizing a smooth objective over
vectors of Cholesky-factor parameters under per-group squared-norm budgets
(each group's squared norm is a covariance trace).  This module provides the
multi-start projected-ascent engine driving them, a golden-section scalar
minimizer, sum-power water-filling, and the -inf sentinel used by the
Lagrangian case analysis.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import NonPositivePower, SolverDiverged, ZeroChannel
from .linalg import symmetrize


class _NegInf:
    """Distinguished sentinel ordered below every finite value.

    Comparison is allowed; arithmetic is a bug and raises immediately.
    """

    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self):
        return "NEG_INF"

    def __eq__(self, other):
        return other is self

    def __hash__(self):
        return hash("cograte.NEG_INF")

    def __lt__(self, other):
        return other is not self

    def __le__(self, other):
        return True

    def __gt__(self, other):
        return False

    def __ge__(self, other):
        return other is self

    def _forbidden(self, *_args):
        raise TypeError("arithmetic with the -inf sentinel is forbidden; compare only")

    __add__ = __radd__ = __sub__ = __rsub__ = _forbidden
    __mul__ = __rmul__ = _forbidden
    __truediv__ = __rtruediv__ = _forbidden
    __neg__ = __pos__ = __abs__ = _forbidden


#: Sentinel returned by the Lagrangian reductions on infeasible allocations.
NEG_INF = _NegInf()


@dataclass(frozen=True)
class SolverSettings:
    """Knobs of the projected-ascent solvers.

    ``gap`` is the accepted optimality gap in bits when a solver is compared
    against a brute-force oracle.
    """

    starts: int = 16
    max_iters: int = 2000
    grad_step: float = 1e-5
    rel_tol: float = 1e-9
    seed: int = 0
    gap: float = 1e-2

    def __post_init__(self):
        if self.starts <= 0 or self.max_iters <= 0:
            raise ValueError("starts and max_iters must be positive")
        if self.grad_step <= 0 or self.rel_tol <= 0 or self.gap <= 0:
            raise ValueError("grad_step, rel_tol and gap must be positive")
        if self.gap < self.rel_tol:
            raise ValueError("gap must be >= rel_tol")


def make_group_projection(groups):
    """Projection onto a product of parameter-group balls.

    ``groups`` is a sequence of (index_array, budget) pairs; each group is
    rescaled onto its ball when its squared norm exceeds the budget.  This is
    the exact Euclidean projection because the groups are disjoint.
    """
    groups = [(np.asarray(idx, dtype=int), float(b)) for idx, b in groups]

    def project(theta: np.ndarray) -> np.ndarray:
        theta = np.array(theta, dtype=float, copy=True)
        flat = theta.reshape(-1, theta.shape[-1])
        for idx, budget in groups:
            sq = np.sum(flat[:, idx] ** 2, axis=1)
            factor = np.ones_like(sq)
            over = sq > budget
            factor[over] = np.sqrt(budget / sq[over])
            flat[:, idx] = flat[:, idx] * factor[:, None]
        return flat.reshape(theta.shape)

    return project


_LADDER = np.array([4.0, 1.0, 0.25, 0.0625])
_MOMENTUM = np.array([2.0, 8.0, 32.0])


def maximize_multistart(
    objective,
    n_params: int,
    project,
    settings: SolverSettings,
    scale: float = 1.0,
    extra_starts=(),
):
    """Multi-start projected gradient ascent; returns the best (value, theta).

    ``objective`` maps a (batch, n_params) array to a (batch,) value array and
    must be finite on the whole parameter space; ``project`` maps parameter
    batches onto the feasible set.  ``extra_starts`` are deterministic warm
    starts evaluated alongside the seeded random ones.

    Every start climbs in lockstep so that all gradient perturbations and
    line-search candidates of one iteration land in a single batched
    objective call (the matrices are tiny; call overhead dominates).  Each
    iteration line-searches along the central-difference gradient over a
    step ladder and also tries heavy-ball extrapolations along the recent
    trajectory; a start retires after three consecutive relative
    improvements below ``rel_tol`` or when its step underflows.
    """
    rng = np.random.Generator(np.random.Philox(np.random.SeedSequence(settings.seed)))
    starts = [np.zeros(n_params)]
    for theta in extra_starts:
        theta = np.asarray(theta, dtype=float).reshape(-1)
        if theta.size != n_params:
            raise ValueError("extra start has wrong length")
        starts.append(theta)
    for i in range(settings.starts):
        radius = scale * (0.3 if i % 2 else 1.0)
        starts.append(radius * rng.standard_normal(n_params))

    thetas = project(np.asarray(starts, dtype=float))
    n_starts, k = thetas.shape
    vals = np.asarray(objective(thetas), dtype=float)
    if not np.all(np.isfinite(vals)):
        raise SolverDiverged("non-finite objective at a start point")

    step = np.full(n_starts, 0.25 * scale)
    stall = np.zeros(n_starts, dtype=int)
    prev = thetas.copy()  # first momentum candidates are no-ops
    active = np.ones(n_starts, dtype=bool)
    eye = np.eye(k)
    n_cand = len(_LADDER) + len(_MOMENTUM)

    for _ in range(settings.max_iters):
        idx = np.nonzero(active)[0]
        if idx.size == 0:
            break
        th = thetas[idx]
        h = settings.grad_step * (1.0 + np.abs(th))
        pert = np.concatenate(
            [th[:, None, :] + h[:, None, :] * eye, th[:, None, :] - h[:, None, :] * eye],
            axis=1,
        )
        pvals = np.asarray(objective(pert.reshape(-1, k)), dtype=float).reshape(len(idx), 2 * k)
        if not np.all(np.isfinite(pvals)):
            raise SolverDiverged("non-finite objective during gradient evaluation")
        grad = (pvals[:, :k] - pvals[:, k:]) / (2.0 * h)
        gnorm = np.linalg.norm(grad, axis=1)
        dead = gnorm < 1e-15
        if np.any(dead):
            active[idx[dead]] = False
            keep = ~dead
            idx, th, grad, gnorm = idx[keep], th[keep], grad[keep], gnorm[keep]
            if idx.size == 0:
                continue
        direction = grad / gnorm[:, None]
        ladders = _LADDER[None, :] * step[idx][:, None]
        cands = np.concatenate(
            [
                th[:, None, :] + ladders[:, :, None] * direction[:, None, :],
                th[:, None, :] + _MOMENTUM[None, :, None] * (th - prev[idx])[:, None, :],
            ],
            axis=1,
        )
        cands = project(cands.reshape(-1, k)).reshape(len(idx), n_cand, k)
        cvals = np.asarray(objective(cands.reshape(-1, k)), dtype=float).reshape(
            len(idx), n_cand
        )
        if not np.all(np.isfinite(cvals)):
            raise SolverDiverged("non-finite objective during line search")
        best = np.argmax(cvals, axis=1)
        rows = np.arange(len(idx))
        improved = cvals[rows, best] > vals[idx]
        for local, start in enumerate(idx):
            b = best[local]
            if improved[local]:
                gain = cvals[local, b] - vals[start]
                prev[start] = thetas[start]
                thetas[start] = cands[local, b]
                vals[start] = cvals[local, b]
                if b < len(_LADDER):
                    step[start] = max(ladders[local, b], 1e-14)
                if gain < settings.rel_tol * (1.0 + abs(vals[start])):
                    stall[start] += 1
                    if stall[start] >= 3:
                        active[start] = False
                else:
                    stall[start] = 0
            else:
                step[start] *= 0.25
                if step[start] < 1e-13 * scale:
                    active[start] = False

    winner = int(np.argmax(vals))
    return float(vals[winner]), thetas[winner]


_INV_PHI = (math.sqrt(5.0) - 1.0) / 2.0


def golden_section(f, lo: float, hi: float, tol: float = 1e-10, max_iters: int = 200):
    """Minimize a unimodal scalar function on [lo, hi]; returns (x, f(x))."""
    a, b = (lo, hi) if lo <= hi else (hi, lo)
    c = b - _INV_PHI * (b - a)
    d = a + _INV_PHI * (b - a)
    fc, fd = f(c), f(d)
    for _ in range(max_iters):
        if b - a <= tol:
            break
        if fc < fd:
            b, d, fd = d, c, fc
            c = b - _INV_PHI * (b - a)
            fc = f(c)
        else:
            a, c, fc = c, d, fd
            d = a + _INV_PHI * (b - a)
            fd = f(d)
    if fc < fd:
        return c, fc
    return d, fd


@dataclass(frozen=True)
class ScanResult:
    x: float
    value: float
    non_unimodal: bool
    edge: int  # -1 best at low edge, +1 at high edge, 0 interior
    flat: bool


def scan_then_golden(f, xs, tol: float = 1e-10) -> ScanResult:
    """Coarse scan over ``xs`` followed by golden-section polish.

    Counts interior local minima of the scan; more than one flags the
    unimodality assumption and the result falls back to polishing around the
    scan minimum only.
    """
    xs = np.asarray(xs, dtype=float)
    vals = np.array([f(x) for x in xs], dtype=float)
    if not np.all(np.isfinite(vals)):
        raise SolverDiverged("non-finite value during scalar pre-scan")
    spread = float(np.max(vals) - np.min(vals))
    if spread < 1e-12:
        mid = len(xs) // 2
        return ScanResult(float(xs[mid]), float(vals[mid]), False, 0, True)
    minima = 0
    for i in range(1, len(xs) - 1):
        if vals[i] < vals[i - 1] - 1e-12 and vals[i] < vals[i + 1] - 1e-12:
            minima += 1
    best = int(np.argmin(vals))
    edge = -1 if best == 0 else (1 if best == len(xs) - 1 else 0)
    lo = xs[max(best - 1, 0)]
    hi = xs[min(best + 1, len(xs) - 1)]
    x, fx = golden_section(f, float(lo), float(hi), tol=tol)
    if vals[best] < fx:
        x, fx = float(xs[best]), float(vals[best])
    return ScanResult(float(x), float(fx), minima > 1, edge, False)


def waterfill(h: np.ndarray, p_total: float, real_mode: bool = False, tol: float = 1e-12):
    """Capacity-achieving covariance of a point-to-point link under a trace cap.

    Maximizes log2|I + h S h†| over PSD S with Tr(S) <= p_total by pouring
    power over the squared singular values of ``h``; the dual water level is
    found by bisection.  Returns (capacity_bits, sigma); capacity carries the
    1/2 real-signalling prefactor when ``real_mode``.

    Raises
    ------
    ZeroChannel
        If ``h`` is identically zero.
    """
    h = np.asarray(h)
    if h.ndim != 2:
        raise ValueError("h must be a 2-D matrix")
    if not np.any(h != 0):
        raise ZeroChannel("water-filling requires a nonzero channel matrix")
    p_total = float(p_total)
    if not math.isfinite(p_total) or p_total <= 0.0:
        raise NonPositivePower(f"p_total must be positive, got {p_total}")

    _, s, vh = np.linalg.svd(h, full_matrices=False)
    gains = s**2
    keep = gains > max(gains[0] * 1e-15, 0.0)
    gains = gains[keep]
    v = np.conj(vh[keep].T)

    inv = 1.0 / gains
    lo, hi = 0.0, p_total + float(np.max(inv))
    for _ in range(200):
        if hi - lo <= tol:
            break
        mid = 0.5 * (lo + hi)
        if float(np.sum(np.clip(mid - inv, 0.0, None))) >= p_total:
            hi = mid
        else:
            lo = mid
    level = 0.5 * (lo + hi)
    powers = np.clip(level - inv, 0.0, None)
    total = float(np.sum(powers))
    if total > 0.0:
        powers *= p_total / total
    sigma = symmetrize((v * powers) @ np.conj(v.T))
    capacity = float(np.sum(np.log2(1.0 + gains * powers)))
    if real_mode:
        capacity *= 0.5
    return capacity, sigma
