"""Channel model: the two-transmitter cognitive link and its derived matrices.

The system is

    y_p = H_pp x_p + H_cp x_c + z_p
    y_c = H_pc x_p + H_cc x_c + z_c

with unit-covariance Gaussian noise at both receivers and transmit power
budgets ``p_p`` and ``p_c``.  ``real_mode`` restricts coefficients and inputs
to the reals, in which case every rate formula downstream carries a 1/2
prefactor.
"""

from __future__ import annotations

import hashlib
import json
import math
from dataclasses import dataclass

import numpy as np

from .errors import (
    DimensionMismatch,
    InvalidAlpha,
    NonPositivePower,
    ParseError,
    SingularNoise,
)
from .linalg import DEFAULT_TOL, logdet2_pd, min_eigenvalue, project_psd, symmetrize


def _as_matrix(value, key: str, real_mode: bool) -> np.ndarray:
    """Coerce a JSON value (scalar, column list, or nested rows) to a matrix.

    Entries are numbers or [re, im] pairs; a bare scalar means a 1x1 matrix
    and a flat list of numbers means a column vector.
    """

    def entry(x):
        if isinstance(x, (int, float)):
            return complex(x)
        if isinstance(x, list) and len(x) == 2 and all(isinstance(v, (int, float)) for v in x):
            return complex(x[0], x[1])
        raise ParseError(f"{key}: entry {x!r} is not a number or [re, im] pair")

    if isinstance(value, (int, float)):
        rows = [[entry(value)]]
    elif isinstance(value, list) and value and all(isinstance(v, (int, float)) for v in value):
        rows = [[entry(v)] for v in value]
    elif isinstance(value, list) and value and all(isinstance(v, list) for v in value):
        width = None
        rows = []
        for r in value:
            row = [entry(v) for v in r]
            if width is None:
                width = len(row)
            elif len(row) != width:
                raise ParseError(f"{key}: ragged rows")
            rows.append(row)
        if width == 0:
            raise ParseError(f"{key}: empty rows")
    else:
        raise ParseError(f"{key}: expected a number or an array of rows")

    m = np.asarray(rows, dtype=complex)
    if real_mode:
        if np.any(np.imag(m) != 0.0):
            raise ParseError(f"{key}: complex entry in a real_mode channel")
        return np.real(m).astype(float)
    return m


@dataclass(frozen=True)
class CognitiveChannel:
    """Static channel matrices and power budgets of the cognitive link.

    Antenna counts are inferred: n_pt = cols(h_pp), n_pr = rows(h_pp),
    n_ct = cols(h_cc), n_cr = rows(h_cc).
    """

    h_pp: np.ndarray
    h_pc: np.ndarray
    h_cp: np.ndarray
    h_cc: np.ndarray
    p_p: float
    p_c: float
    real_mode: bool = False

    def __post_init__(self):
        for name in ("h_pp", "h_pc", "h_cp", "h_cc"):
            m = np.asarray(getattr(self, name))
            if m.ndim != 2:
                raise DimensionMismatch(f"{name} must be a 2-D matrix")
            object.__setattr__(self, name, m)
        if self.h_pc.shape != (self.n_cr, self.n_pt):
            raise DimensionMismatch(
                f"h_pc has shape {self.h_pc.shape}, expected {(self.n_cr, self.n_pt)}"
            )
        if self.h_cp.shape != (self.n_pr, self.n_ct):
            raise DimensionMismatch(
                f"h_cp has shape {self.h_cp.shape}, expected {(self.n_pr, self.n_ct)}"
            )
        for name in ("p_p", "p_c"):
            p = float(getattr(self, name))
            if not math.isfinite(p) or p <= 0.0:
                raise NonPositivePower(f"{name} must be a finite positive number, got {p}")
            object.__setattr__(self, name, p)

    @property
    def n_pt(self) -> int:
        return self.h_pp.shape[1]

    @property
    def n_pr(self) -> int:
        return self.h_pp.shape[0]

    @property
    def n_ct(self) -> int:
        return self.h_cc.shape[1]

    @property
    def n_cr(self) -> int:
        return self.h_cc.shape[0]

    @property
    def rate_scale(self) -> float:
        """Prefactor on every log-det rate: 1/2 for real signalling, else 1."""
        return 0.5 if self.real_mode else 1.0

    def digest(self) -> str:
        """Stable hash of the channel contents, recorded in output metadata."""
        payload = {
            "h_pp": _matrix_payload(self.h_pp),
            "h_pc": _matrix_payload(self.h_pc),
            "h_cp": _matrix_payload(self.h_cp),
            "h_cc": _matrix_payload(self.h_cc),
            "p_p": self.p_p,
            "p_c": self.p_c,
            "real_mode": self.real_mode,
        }
        blob = json.dumps(payload, sort_keys=True, separators=(",", ":"))
        return hashlib.sha256(blob.encode()).hexdigest()[:16]


def _matrix_payload(m: np.ndarray):
    if np.iscomplexobj(m):
        return [[[float(np.real(v)), float(np.imag(v))] for v in row] for row in m]
    return [[float(v) for v in row] for row in m]


@dataclass(frozen=True)
class CompositeMatrices:
    """Block matrices assembled from a channel at a given alpha scaling.

    ``g`` stacks the two paths into the licensed receiver; ``g_alpha`` divides
    the cognitive path by sqrt(alpha); ``k`` keeps only the cognitive
    receiver's own path; ``k_bar`` stacks ``g_alpha`` on top of ``k``'s block
    row, covering both receivers.
    """

    g: np.ndarray
    g_alpha: np.ndarray
    k: np.ndarray
    k_bar: np.ndarray
    alpha: float = 1.0


def _check_alpha(alpha: float) -> float:
    alpha = float(alpha)
    if not math.isfinite(alpha) or alpha <= 0.0:
        raise InvalidAlpha(f"alpha must be finite and positive, got {alpha}")
    return alpha


def load_channel(spec_text: str) -> CognitiveChannel:
    """Parse a channel-spec JSON document into a validated channel.

    The document is an object with keys ``h_pp``, ``h_pc``, ``h_cp``, ``h_cc``
    (row-major arrays of arrays, entries real numbers or [re, im] pairs),
    ``p_p``, ``p_c`` (positive numbers) and optional ``real_mode`` (default
    false).  Scalars and flat lists are accepted as 1x1 matrices and column
    vectors respectively.
    """
    try:
        doc = json.loads(spec_text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"malformed JSON: {exc}") from exc
    if not isinstance(doc, dict):
        raise ParseError("channel spec must be a JSON object")
    missing = [k for k in ("h_pp", "h_pc", "h_cp", "h_cc", "p_p", "p_c") if k not in doc]
    if missing:
        raise ParseError(f"channel spec missing keys: {', '.join(missing)}")
    real_mode = doc.get("real_mode", False)
    if not isinstance(real_mode, bool):
        raise ParseError("real_mode must be a boolean")
    mats = {k: _as_matrix(doc[k], k, real_mode) for k in ("h_pp", "h_pc", "h_cp", "h_cc")}
    for k in ("p_p", "p_c"):
        if not isinstance(doc[k], (int, float)):
            raise ParseError(f"{k} must be a number")
    return CognitiveChannel(
        h_pp=mats["h_pp"],
        h_pc=mats["h_pc"],
        h_cp=mats["h_cp"],
        h_cc=mats["h_cc"],
        p_p=float(doc["p_p"]),
        p_c=float(doc["p_c"]),
        real_mode=real_mode,
    )


def scaled_channel(ch: CognitiveChannel, alpha: float) -> CognitiveChannel:
    """Equivalent channel with h_cp, h_cc divided by sqrt(alpha) and the
    cognitive power budget multiplied by alpha."""
    alpha = _check_alpha(alpha)
    root = math.sqrt(alpha)
    return CognitiveChannel(
        h_pp=ch.h_pp,
        h_pc=ch.h_pc,
        h_cp=ch.h_cp / root,
        h_cc=ch.h_cc / root,
        p_p=ch.p_p,
        p_c=alpha * ch.p_c,
        real_mode=ch.real_mode,
    )


def composite_matrices(ch: CognitiveChannel, alpha: float) -> CompositeMatrices:
    """Assemble the four block matrices used by the bound computations."""
    alpha = _check_alpha(alpha)
    root = math.sqrt(alpha)
    g = np.hstack([ch.h_pp, ch.h_cp])
    g_alpha = np.hstack([ch.h_pp, ch.h_cp / root])
    k = np.hstack([np.zeros((ch.n_cr, ch.n_pt), dtype=ch.h_cc.dtype), ch.h_cc / root])
    top = np.hstack([ch.h_pp, ch.h_cp / root])
    bottom = np.hstack([np.zeros((ch.n_cr, ch.n_pt), dtype=ch.h_cc.dtype), ch.h_cc / root])
    k_bar = np.vstack([top, bottom])
    return CompositeMatrices(g=g, g_alpha=g_alpha, k=k, k_bar=k_bar, alpha=alpha)


def _psd_sqrt(m: np.ndarray) -> np.ndarray:
    s = project_psd(m)
    w, v = np.linalg.eigh(s)
    return (v * np.sqrt(np.clip(w, 0.0, None))) @ np.conj(v.T)


def mc_mutual_info(
    h: np.ndarray,
    sigma_x: np.ndarray,
    sigma_noise: np.ndarray,
    n_samples: int,
    seed: int,
    real_mode: bool = False,
) -> float:
    """Plug-in Monte-Carlo estimate of the Gaussian mutual information of
    y = h x + z, in bits.

    Draws ``n_samples`` of x ~ N(0, sigma_x) and z ~ N(0, sigma_noise) from a
    counter-based Philox stream keyed by ``seed`` (bit-reproducible), forms
    the zero-mean sample covariance of y and returns
    log2 det(cov_hat_y) - log2 det(sigma_noise), halved in real mode.

    Raises
    ------
    SingularNoise
        If ``sigma_noise`` is not strictly positive definite.
    """
    if n_samples <= 0:
        raise ValueError("n_samples must be positive")
    h = np.asarray(h, dtype=float if real_mode else complex)
    if h.ndim != 2:
        raise DimensionMismatch("h must be a 2-D matrix")
    d_out, d_in = h.shape
    sigma_x = symmetrize(np.asarray(sigma_x, dtype=h.dtype))
    sigma_noise = symmetrize(np.asarray(sigma_noise, dtype=h.dtype))
    if sigma_x.shape != (d_in, d_in) or sigma_noise.shape != (d_out, d_out):
        raise DimensionMismatch("covariance shapes inconsistent with h")
    if min_eigenvalue(sigma_noise) <= DEFAULT_TOL:
        raise SingularNoise("sigma_noise must be strictly positive definite")

    ax = _psd_sqrt(sigma_x)
    az = _psd_sqrt(sigma_noise)
    rng = np.random.Generator(np.random.Philox(key=int(seed) & (2**64 - 1)))

    cov_sum = np.zeros((d_out, d_out), dtype=h.dtype)
    remaining = int(n_samples)
    chunk = 1 << 16
    while remaining > 0:
        n = min(chunk, remaining)
        remaining -= n
        if real_mode:
            ex = rng.standard_normal((n, d_in))
            ez = rng.standard_normal((n, d_out))
            x = ex @ ax.T
            z = ez @ az.T
        else:
            ex = rng.standard_normal((n, d_in)) + 1j * rng.standard_normal((n, d_in))
            ez = rng.standard_normal((n, d_out)) + 1j * rng.standard_normal((n, d_out))
            x = (ex / np.sqrt(2.0)) @ ax.T
            z = (ez / np.sqrt(2.0)) @ az.T
        y = x @ h.T + z
        cov_sum += y.T @ np.conj(y)
    cov_y = symmetrize(cov_sum / n_samples)
    estimate = logdet2_pd(cov_y) - logdet2_pd(sigma_noise)
    return 0.5 * estimate if real_mode else estimate
