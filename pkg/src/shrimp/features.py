"""q-sparse random Fourier weight banks and the real trig design matrix."""
from __future__ import annotations

import math
import struct
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import ParameterError
from .sampling import SubsetPlan, plan_subsets

COS, SIN = 0, 1

_MAGIC = b"SHRB"
_VERSION = 1
_HEADER = struct.Struct("<4sHQQQd")


@dataclass(frozen=True, eq=False)
class FeatureBank:
    """Weight matrix ``W`` (N x d) whose row j is zero outside ``supports[j]``."""

    W: np.ndarray
    supports: np.ndarray  # (N, q) int, sorted per row
    q: int
    sigma2: float

    @property
    def N(self) -> int:
        return self.W.shape[0]

    @property
    def d(self) -> int:
        return self.W.shape[1]

    def nonzero_values(self) -> np.ndarray:
        return np.take_along_axis(self.W, self.supports, axis=1)


def build_bank(plan: SubsetPlan, sigma2: float | None, rng: np.random.Generator) -> FeatureBank:
    """Draw one weight row per (subset, repetition) pair of ``plan``.

    Nonzero entries are i.i.d. N(0, sigma2); ``sigma2=None`` means 1/q.
    """
    if sigma2 is None:
        sigma2 = 1.0 / plan.q
    if not sigma2 > 0:
        raise ParameterError(f"sigma2 must be positive, got {sigma2}")
    supports = np.repeat(np.asarray(plan.subsets, dtype=np.int64), plan.counts, axis=0)
    values = rng.normal(0.0, np.sqrt(sigma2), size=supports.shape)
    W = np.zeros((supports.shape[0], plan.d))
    np.put_along_axis(W, supports, values, axis=1)
    return FeatureBank(W, supports, plan.q, float(sigma2))


def sparse_bank(d: int, q: int, N: int, rng: np.random.Generator, sigma2: float | None = None) -> FeatureBank:
    """Shortcut for ``build_bank(plan_subsets(d, q, N, rng), sigma2, rng)``."""
    return build_bank(plan_subsets(d, q, N, rng), sigma2, rng)


@dataclass(frozen=True, eq=False)
class DesignMatrix:
    """Columns of ``[cos(X W^T), sin(X W^T)]`` with their provenance.

    ``columns`` holds global column ids in ``[0, 2N)``: id ``j`` is the cosine
    of weight row ``j`` and id ``N + j`` its sine. A restricted design keeps
    the ids of the columns it retains.
    """

    A: np.ndarray
    columns: np.ndarray
    bank: FeatureBank

    @property
    def m(self) -> int:
        return self.A.shape[0]

    @property
    def rows(self) -> np.ndarray:
        return self.columns % self.bank.N

    @property
    def parity(self) -> np.ndarray:
        return self.columns // self.bank.N

    def __len__(self) -> int:
        return self.A.shape[1]


def _check_X(bank: FeatureBank, X) -> np.ndarray:
    X = np.atleast_2d(np.asarray(X, dtype=float))
    if X.shape[1] != bank.d:
        raise ParameterError(f"X has {X.shape[1]} columns, bank expects d={bank.d}")
    return X


def design(bank: FeatureBank, X) -> DesignMatrix:
    X = _check_X(bank, X)
    Z = X @ bank.W.T
    A = np.empty((X.shape[0], 2 * bank.N), order="F")
    np.cos(Z, out=A[:, : bank.N])
    np.sin(Z, out=A[:, bank.N :])
    return DesignMatrix(A, np.arange(2 * bank.N), bank)


def feature_columns(bank: FeatureBank, X, columns) -> np.ndarray:
    """Evaluate only the requested global columns on ``X``."""
    X = _check_X(bank, X)
    columns = np.asarray(columns, dtype=np.int64)
    if columns.size and (columns.min() < 0 or columns.max() >= 2 * bank.N):
        raise ParameterError("column id out of range")
    rows = columns % bank.N
    Z = X @ bank.W[rows].T
    return np.where(columns < bank.N, np.cos(Z), np.sin(Z))


def restrict(dm: DesignMatrix, P) -> DesignMatrix:
    """Column submatrix for the global ids in ``P`` (must be active in ``dm``)."""
    P = np.unique(np.asarray(P, dtype=np.int64))
    if P.size and (P.min() < 0 or P.max() >= 2 * dm.bank.N):
        raise ParameterError("column id out of range")
    pos = np.searchsorted(dm.columns, P)
    ok = (pos < len(dm.columns)) & (dm.columns[np.minimum(pos, len(dm.columns) - 1)] == P)
    if not ok.all():
        raise ParameterError(f"columns {P[~ok][:5].tolist()} are not active in this design")
    return DesignMatrix(np.asfortranarray(dm.A[:, pos]), P, dm.bank)


def gram_expectation_error(X, q: int, n_grid, rng: np.random.Generator, sigma2: float | None = None) -> np.ndarray:
    """Relative Frobenius error of ``A A^T / N`` against the normalized additive kernel.

    For each ``n`` in ``n_grid`` a fresh bank with ``n`` weights per subset is
    drawn (enumeration mode, ``N = n C(d, q)``).
    """
    from .baselines import additive_kernel_matrix

    X = np.atleast_2d(np.asarray(X, dtype=float))
    d = X.shape[1]
    K = additive_kernel_matrix(X, X, q, sigma2=sigma2, normalize=True)
    out = []
    for n in n_grid:
        N = int(n) * math.comb(d, q)
        bank = sparse_bank(d, q, N, rng, sigma2)
        A = design(bank, X).A
        out.append(np.linalg.norm(A @ A.T / N - K) / np.linalg.norm(K))
    return np.array(out)


def save_bank(bank: FeatureBank, path) -> None:
    """Binary snapshot: header, then row-major nonzero values (f64) and support indices (u64)."""
    with open(path, "wb") as fh:
        fh.write(_HEADER.pack(_MAGIC, _VERSION, bank.d, bank.q, bank.N, bank.sigma2))
        fh.write(np.ascontiguousarray(bank.nonzero_values(), dtype="<f8").tobytes())
        fh.write(np.ascontiguousarray(bank.supports, dtype="<u8").tobytes())


def load_bank(path) -> FeatureBank:
    raw = Path(path).read_bytes()
    magic, version, d, q, N, sigma2 = _HEADER.unpack_from(raw)
    if magic != _MAGIC or version != _VERSION:
        raise ParameterError(f"{path}: not a version-{_VERSION} bank file")
    off = _HEADER.size
    values = np.frombuffer(raw, dtype="<f8", count=N * q, offset=off).reshape(N, q)
    supports = np.frombuffer(raw, dtype="<u8", count=N * q, offset=off + 8 * N * q).astype(np.int64).reshape(N, q)
    W = np.zeros((N, d))
    np.put_along_axis(W, supports, values, axis=1)
    return FeatureBank(W, supports, q, sigma2)
