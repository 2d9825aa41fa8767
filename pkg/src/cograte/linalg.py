"""Small dense Hermitian/PSD kernels shared by every rate computation.

All logarithms are base 2 so downstream rates read in bits.  Matrices stay
plain numpy arrays; Hermitian symmetry is enforced explicitly through
:func:`symmetrize` before any eigen-solve to kill floating-point drift.
"""

from __future__ import annotations

import numpy as np

from .errors import NonPositiveDefinite

LN2 = float(np.log(2.0))

#: Default eigenvalue tolerance for PSD certification.
DEFAULT_TOL = 1e-9


def symmetrize(a: np.ndarray) -> np.ndarray:
    """Return (A + A†)/2, the exactly Hermitian part of ``a``."""
    a = np.asarray(a)
    return 0.5 * (a + np.conj(np.swapaxes(a, -1, -2)))


def min_eigenvalue(a: np.ndarray) -> float:
    """Smallest eigenvalue of the symmetrized input."""
    return float(np.linalg.eigvalsh(symmetrize(a))[0])


def is_psd(m: np.ndarray, tol: float = DEFAULT_TOL) -> bool:
    """True iff the smallest eigenvalue of ``m`` is >= -tol.

    Parameters
    ----------
    m : ndarray
        Square matrix (Hermitian up to round-off; symmetrized internally).
    tol : float
        Nonnegative eigenvalue tolerance.
    """
    if tol < 0:
        raise ValueError("tol must be nonnegative")
    return min_eigenvalue(m) >= -tol


def project_psd(m: np.ndarray) -> np.ndarray:
    """Project onto the PSD cone by clipping negative eigenvalues to zero.

    Idempotent, and the identity on matrices that are already PSD.
    """
    s = symmetrize(m)
    w, v = np.linalg.eigh(s)
    if w[0] >= 0.0:
        return s
    w = np.clip(w, 0.0, None)
    return symmetrize((v * w) @ np.conj(v.T))


def logdet2_pd(a: np.ndarray, tol: float = DEFAULT_TOL) -> float:
    """log2-determinant of a Hermitian positive definite matrix.

    Cholesky is tried first (fast, stable); on failure the eigenvalues of the
    symmetrized matrix are used, raising :class:`NonPositiveDefinite` when any
    eigenvalue is <= ``tol``.
    """
    s = symmetrize(a)
    try:
        c = np.linalg.cholesky(s)
        return float(2.0 * np.sum(np.log2(np.real(np.diagonal(c)))))
    except np.linalg.LinAlgError:
        w = np.linalg.eigvalsh(s)
        if w[0] <= tol:
            raise NonPositiveDefinite(
                f"matrix has eigenvalue {w[0]:.3e} <= tolerance {tol:.1e}"
            ) from None
        return float(np.sum(np.log2(w)))


def log_det_id_plus(m: np.ndarray, tol: float = DEFAULT_TOL) -> float:
    """Evaluate log2 det(I + m) for Hermitian ``m`` with I + m > 0.

    This is the kernel of every rate formula in the package.  Callers in
    real-signal mode apply their own 1/2 prefactor.

    Raises
    ------
    NonPositiveDefinite
        If any eigenvalue of I + m is <= ``tol`` (signals an infeasible or
        corrupt covariance upstream).
    """
    m = np.asarray(m, dtype=complex) if np.iscomplexobj(m) else np.asarray(m, dtype=float)
    eye = np.eye(m.shape[-1], dtype=m.dtype)
    return logdet2_pd(eye + m, tol=tol)


def log_det_id_plus_dir(a: np.ndarray, d: np.ndarray) -> float:
    """Analytic directional derivative of ``log_det_id_plus`` at ``a`` along ``d``.

    Equals Tr((I + a)^{-1} d) / ln 2, the classical trace form.
    """
    a = symmetrize(a)
    d = symmetrize(d)
    eye = np.eye(a.shape[-1], dtype=a.dtype)
    x = np.linalg.solve(eye + a, d)
    return float(np.real(np.trace(x))) / LN2


# ---------------------------------------------------------------------------
# Unconstrained-vector <-> PSD parameterization (lower-triangular factors).
#
# A real parameter vector of length ``param_len(dim, complex_mode)`` fills a
# lower-triangular L row-major; decode returns L L†, PSD by construction for
# every finite vector.  In complex mode each strictly-lower entry consumes a
# (re, im) pair while diagonal entries stay real, so the length is dim².
# ---------------------------------------------------------------------------


def param_len(dim: int, complex_mode: bool = False) -> int:
    """Number of real parameters for a ``dim`` x ``dim`` factor."""
    if dim <= 0:
        raise ValueError("dim must be positive")
    return dim * dim if complex_mode else dim * (dim + 1) // 2


def param_rows(dim: int, complex_mode: bool = False) -> np.ndarray:
    """Row index of L that each parameter slot feeds (row-major layout).

    Used by trace projections: trace(L L†) restricted to a row group equals
    the squared norm of that group's parameters, in real and complex mode.
    """
    rows = []
    for i in range(dim):
        for j in range(i + 1):
            rows.append(i)
            if complex_mode and j < i:
                rows.append(i)
    return np.asarray(rows, dtype=int)


def build_lower(theta: np.ndarray, dim: int, complex_mode: bool = False) -> np.ndarray:
    """Fill lower-triangular factors from parameter vectors.

    Parameters
    ----------
    theta : ndarray, shape (..., param_len(dim, complex_mode))
        Real parameter vectors; a leading batch axis is supported.
    dim : int
        Factor dimension.
    complex_mode : bool
        When true, strictly-lower entries are read as (re, im) pairs.

    Returns
    -------
    ndarray, shape (..., dim, dim)
        Lower-triangular L (complex dtype in complex mode).
    """
    theta = np.asarray(theta, dtype=float)
    k = param_len(dim, complex_mode)
    if theta.shape[-1] != k:
        raise ValueError(f"expected {k} parameters, got {theta.shape[-1]}")
    batch = theta.shape[:-1]
    dtype = complex if complex_mode else float
    out = np.zeros(batch + (dim, dim), dtype=dtype)
    pos = 0
    for i in range(dim):
        for j in range(i + 1):
            if complex_mode and j < i:
                out[..., i, j] = theta[..., pos] + 1j * theta[..., pos + 1]
                pos += 2
            else:
                out[..., i, j] = theta[..., pos]
                pos += 1
    return out


def decode_param(values: np.ndarray, dim: int, complex_mode: bool = False) -> np.ndarray:
    """Decode a parameter vector into the PSD matrix L L†."""
    low = build_lower(values, dim, complex_mode)
    return low @ np.conj(np.swapaxes(low, -1, -2))


def encode_psd(m: np.ndarray, complex_mode: bool = False, jitter: float = 1e-12) -> np.ndarray:
    """Inverse of :func:`decode_param` up to ``jitter`` on the diagonal.

    The input is floored onto the PSD cone and given a tiny diagonal boost so
    the Cholesky factor exists for rank-deficient matrices; used to warm-start
    solvers from known allocations.
    """
    s = project_psd(m)
    dim = s.shape[-1]
    scale = max(float(np.real(np.trace(s))) / dim, 1.0)
    low = np.linalg.cholesky(s + jitter * scale * np.eye(dim, dtype=s.dtype))
    theta = []
    for i in range(dim):
        for j in range(i + 1):
            if complex_mode and j < i:
                theta.append(float(np.real(low[i, j])))
                theta.append(float(np.imag(low[i, j])))
            else:
                theta.append(float(np.real(low[i, j])))
    return np.asarray(theta, dtype=float)
