"""Minimum-norm least squares, ridge, and extreme eigenvalues of symmetric matrices."""
from __future__ import annotations

import logging
from dataclasses import dataclass

import numpy as np
import scipy.linalg

from .errors import DataError, ParameterError

log = logging.getLogger(__name__)


@dataclass
class LsqSolution:
    c: np.ndarray
    residual_norm: float
    effective_rank: int
    overparameterized: bool


def default_rtol(m: int, k: int) -> float:
    """Relative singular-value cutoff ``eps * max(m, k)`` (the LAPACK rank convention)."""
    return float(np.finfo(float).eps) * max(m, k)


# Gram route is used only while cond(A_kept) stays below this; squaring it must not eat the mantissa
_GRAM_COND_LIMIT = 1e4


def _check_finite(*arrays):
    for a in arrays:
        if not np.all(np.isfinite(a)):
            raise DataError("non-finite entries in input")


def min_norm_lsq(A, y, rtol: float | None = None) -> LsqSolution:
    """``c = A^+ y`` with singular values below ``rtol * s_max`` treated as zero.

    For wide systems (k > m) the m x m Gram ``A A^T`` is eigendecomposed at
    O(k m^2 + m^3), followed by one step of iterative refinement. If that
    spectrum is too ill-conditioned for the squared problem, the solve falls
    back to a QR factorization of ``A^T`` and an SVD of its m x m triangle,
    which has the same cost order without squaring the condition number.
    Tall or square systems use a thin SVD.
    """
    A = np.asarray(A, dtype=float)
    y = np.asarray(y, dtype=float)
    if A.ndim != 2 or A.shape[0] < 1 or A.shape[1] < 1:
        raise ParameterError(f"A must be a nonempty matrix, got shape {A.shape}")
    if y.shape != (A.shape[0],):
        raise ParameterError(f"y has shape {y.shape}, expected ({A.shape[0]},)")
    _check_finite(A, y)
    m, k = A.shape
    if rtol is None:
        rtol = default_rtol(m, k)

    c = None
    if k > m:
        lam, U = np.linalg.eigh(A @ A.T)
        lam_max = lam[-1]
        if lam_max <= 0:
            return LsqSolution(np.zeros(k), float(np.linalg.norm(y)), 0, True)
        keep = lam > (rtol * rtol) * lam_max
        if lam[keep][0] * _GRAM_COND_LIMIT**2 >= lam_max:
            U, lam = U[:, keep], lam[keep]

            def solve_gram(r):
                return U @ ((U.T @ r) / lam)

            c = A.T @ solve_gram(y)
            c += A.T @ solve_gram(y - A @ c)
            rank = int(keep.sum())
        else:
            Q, R = scipy.linalg.qr(A.T, mode="economic", check_finite=False)
            Ur, s, Vt = np.linalg.svd(R.T)  # A = Ur s (Q Vt^T)^T
            keep = s > rtol * s[0]
            c = Q @ (Vt[keep].T @ ((Ur[:, keep].T @ y) / s[keep]))
            rank = int(keep.sum())
    else:
        Uf, s, Vt = np.linalg.svd(A, full_matrices=False)
        keep = s > rtol * s[0] if s[0] > 0 else np.zeros_like(s, bool)
        c = Vt[keep].T @ ((Uf[:, keep].T @ y) / s[keep])
        rank = int(keep.sum())
    res = float(np.linalg.norm(A @ c - y))
    return LsqSolution(c, res, rank, k > m)


def ridge(A, y, lam: float) -> np.ndarray:
    """Solve ``(A^T A + lam I) c = A^T y``, using the dual form when m < k."""
    if lam < 0:
        raise ParameterError(f"lambda must be nonnegative, got {lam}")
    A = np.asarray(A, dtype=float)
    y = np.asarray(y, dtype=float)
    _check_finite(A, y)
    m, k = A.shape
    if lam == 0:
        return min_norm_lsq(A, y).c
    try:
        if m < k:
            alpha = scipy.linalg.solve(A @ A.T + lam * np.eye(m), y, assume_a="pos")
            return A.T @ alpha
        return scipy.linalg.solve(A.T @ A + lam * np.eye(k), A.T @ y, assume_a="pos")
    except (np.linalg.LinAlgError, scipy.linalg.LinAlgError):
        log.warning("ridge system singular at lambda=%g; using min-norm solution", lam)
        return min_norm_lsq(A, y).c


def sym_extreme_eigs(G, tol: float = 1e-10) -> tuple[float, float]:
    """Largest and smallest eigenvalue of a symmetric matrix."""
    G = np.asarray(G, dtype=float)
    if G.ndim != 2 or G.shape[0] != G.shape[1]:
        raise DataError(f"expected a square matrix, got shape {G.shape}")
    _check_finite(G)
    if np.max(np.abs(G - G.T), initial=0.0) > tol * max(1.0, np.max(np.abs(G), initial=0.0)):
        raise DataError("matrix is not symmetric within tolerance")
    ev = scipy.linalg.eigvalsh(G)
    return float(ev[-1]), float(ev[0])


def scaled_gram_extremes(A) -> tuple[float, float]:
    """Extreme eigenvalues of ``A A^T / k`` (k = column count), taken on the smaller side.

    When m > k the k x k Gram ``A^T A / k`` is used instead, whose nonzero
    spectrum is the same.
    """
    A = np.asarray(A, dtype=float)
    m, k = A.shape
    G = A @ A.T if m <= k else A.T @ A
    G = 0.5 * (G + G.T)
    return sym_extreme_eigs(G / k)
