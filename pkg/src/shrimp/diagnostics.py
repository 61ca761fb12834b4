"""Spectra along pruning traces, support recovery, coherence, and eigenvalue bounds."""
from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field

import numpy as np

from .errors import DataError, ParameterError, RegimeError
from .features import COS, DesignMatrix, FeatureBank
from .imp import ImpTrace, PrunedModel, _positions
from .solve import scaled_gram_extremes, sym_extreme_eigs


@dataclass
class SpectrumTrace:
    """Per step: active count, extremes of the scaled Gram, and the unscaled largest eigenvalue."""

    n_active: np.ndarray
    lam_max: np.ndarray
    lam_min: np.ndarray
    lam_max_raw: np.ndarray
    method: str = "shrimp"

    def to_csv(self, path) -> None:
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["t", "n_active", "lambda_max", "lambda_min", "lambda_max_raw", "method"])
            for t, row in enumerate(zip(self.n_active, self.lam_max, self.lam_min, self.lam_max_raw)):
                w.writerow([t, int(row[0]), *(repr(float(v)) for v in row[1:]), self.method])


def spectrum_through_pruning(trace: ImpTrace, dm: DesignMatrix) -> SpectrumTrace:
    """Extreme eigenvalues of ``A_S A_S^T / N_t`` (``A_S^T A_S / N_t`` once N_t < m) per step."""
    n, hi, lo, raw = [], [], [], []
    for mod in trace.models:
        A = dm.A[:, _positions(dm, mod.P)]
        k = A.shape[1]
        lmax, lmin = scaled_gram_extremes(A)
        n.append(k)
        hi.append(lmax)
        lo.append(lmin)
        raw.append(lmax * k)
    return SpectrumTrace(np.array(n), np.array(hi), np.array(lo), np.array(raw), trace.method)


# --------------------------------------------------------------------------
# eigenvalue bounds for the complex Fourier Gram


@dataclass
class Prop1Bounds:
    gamma2: float
    sigma2: float
    q: int
    m: int
    N: int
    lam1_lower: float
    lamm_upper: float

    @property
    def c(self) -> float:
        return self.N / self.m

    @property
    def decay(self) -> float:
        return (4 * self.gamma2 * self.sigma2 + 1) ** (-self.q / 4)


def prop1_bounds(gamma2: float, sigma2: float, q: int, m: int, N: int) -> Prop1Bounds:
    """Lower bound on E lambda_1 and upper bound on E lambda_m of ``A A^* / N`` (needs m <= N)."""
    if min(gamma2, sigma2) <= 0 or min(q, m, N) < 1:
        raise ParameterError("all inputs must be positive")
    if m > N:
        raise RegimeError(f"bounds hold for m <= N, got m={m}, N={N}")
    r = (4 * gamma2 * sigma2 + 1) ** (-q / 4)
    c = N / m
    lam1 = 2 - (N - 1) * m / N**2 + (N - 1) * (m * m - m) / N**2 * r
    lamm = (c - 1) / c + 1 / m + ((c - 1) / c * m + 1) * r
    return Prop1Bounds(gamma2, sigma2, q, m, N, lam1, lamm)


def complex_gram_extremes(C: np.ndarray, S: np.ndarray) -> tuple[float, float]:
    """Extremes of ``H = A A^* / N`` for ``A = C + iS`` via the real embedding [[Re, -Im], [Im, Re]].

    Each eigenvalue of H appears twice in the embedding, so its extremes are H's.
    """
    N = C.shape[1]
    re = (C @ C.T + S @ S.T) / N
    im = (S @ C.T - C @ S.T) / N
    E = np.block([[re, -im], [im, re]])
    return sym_extreme_eigs(0.5 * (E + E.T))


@dataclass
class Prop1Report:
    bounds: Prop1Bounds
    lam1_mean: float
    lam1_se: float
    lamm_mean: float
    lamm_se: float
    trials: int
    lam1_ok: bool
    lamm_ok: bool
    slack: float = 3.0

    @property
    def passed(self) -> bool:
        return self.lam1_ok and self.lamm_ok


def verify_prop1(gamma2, sigma2, q, m, N, trials, rng: np.random.Generator, d: int | None = None, slack: float = 3.0) -> Prop1Report:
    """Monte Carlo means of lambda_1 and lambda_m against the bounds, with ``slack`` standard errors.

    Data are N(0, gamma2 I_d) (d defaults to q); weights are N(0, sigma2) on the first q coordinates.
    """
    if trials < 30:
        raise ParameterError(f"need at least 30 trials, got {trials}")
    bounds = prop1_bounds(gamma2, sigma2, q, m, N)
    d = q if d is None else d
    if d < q:
        raise ParameterError("d must be >= q")
    lam1, lamm = np.empty(trials), np.empty(trials)
    for i in range(trials):
        X = rng.normal(0.0, math.sqrt(gamma2), size=(m, d))
        W = rng.normal(0.0, math.sqrt(sigma2), size=(N, q))
        Z = X[:, :q] @ W.T
        lam1[i], lamm[i] = complex_gram_extremes(np.cos(Z), np.sin(Z))
    se1 = lam1.std(ddof=1) / math.sqrt(trials)
    sem = lamm.std(ddof=1) / math.sqrt(trials)
    m1, mm = float(lam1.mean()), float(lamm.mean())
    return Prop1Report(
        bounds, m1, se1, mm, sem, trials,
        m1 >= bounds.lam1_lower - slack * se1,
        mm <= bounds.lamm_upper + slack * sem,
        slack,
    )


def kernel_entry_check(delta, sigma2: float, n: int, rng: np.random.Generator) -> tuple[float, float, float]:
    """Monte Carlo mean of ``cos<delta, w>`` (real part of exp(i<delta,w>)), its SE, and exp(-sigma2 |delta|^2 / 2)."""
    delta = np.asarray(delta, dtype=float)
    W = rng.normal(0.0, math.sqrt(sigma2), size=(n, delta.size))
    vals = np.cos(W @ delta)
    return float(vals.mean()), float(vals.std(ddof=1) / math.sqrt(n)), math.exp(-0.5 * sigma2 * delta @ delta)


# --------------------------------------------------------------------------
# coherence and the computable parts of the thresholded-BP bound


def coherence(A, block: int = 2048) -> float:
    """Largest |<a_i, a_j>| over distinct normalized columns, computed in column blocks."""
    A = A.A if isinstance(A, DesignMatrix) else np.asarray(A, dtype=float)
    norms = np.linalg.norm(A, axis=0)
    if np.any(norms == 0):
        raise DataError("design has a zero column")
    B = A / norms
    k = B.shape[1]
    mu = 0.0
    for i in range(0, k, block):
        G = np.abs(B[:, i : i + block].T @ B[:, i:])
        n = G.shape[0]
        G[np.arange(n), np.arange(n)] = 0.0
        mu = max(mu, float(G.max(initial=0.0)))
    return min(mu, 1.0)


def coherence_threshold(s: int) -> float:
    if s < 1:
        raise ParameterError(f"s must be >= 1, got {s}")
    return 4 / (math.sqrt(41) * (2 * s - 1))


@dataclass
class Theorem1Components:
    lam_max_over_m: float
    coherence: float
    threshold: float

    @property
    def singular_factor(self) -> float:
        return math.sqrt(self.lam_max_over_m)

    @property
    def coherence_ok(self) -> bool:
        return self.coherence <= self.threshold


def theorem1_components(A, s: int) -> Theorem1Components:
    """``lambda_max(A^T A) / m``, coherence, and the threshold 4 / (sqrt(41)(2s - 1))."""
    A = A.A if isinstance(A, DesignMatrix) else np.asarray(A, dtype=float)
    m = A.shape[0]
    lmax = float(np.linalg.norm(A, 2) ** 2)
    return Theorem1Components(lmax / m, coherence(A), coherence_threshold(s))


# --------------------------------------------------------------------------
# support recovery


@dataclass
class SupportReport:
    cos_mass: np.ndarray
    sin_mass: np.ndarray
    recovered: frozenset = field(default_factory=frozenset)
    tau: float = 1e-3

    @property
    def total(self) -> np.ndarray:
        return self.cos_mass + self.sin_mass

    def dominant_parity(self) -> dict[int, str]:
        return {i: ("cos" if self.cos_mass[i] >= self.sin_mass[i] else "sin") for i in sorted(self.recovered)}

    def to_csv(self, path) -> None:
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["coordinate", "cos_mass", "sin_mass", "recovered"])
            for i, (a, b) in enumerate(zip(self.cos_mass, self.sin_mass)):
                w.writerow([i, repr(float(a)), repr(float(b)), int(i in self.recovered)])


def support_report(model: PrunedModel, bank: FeatureBank, tau: float = 1e-3) -> SupportReport:
    """Coefficient mass per input coordinate, split by cos/sin, and the coordinates above ``tau`` of the total."""
    if not 0 < tau < 1:
        raise ParameterError(f"tau must be in (0, 1), got {tau}")
    cos_mass = np.zeros(bank.d)
    sin_mass = np.zeros(bank.d)
    P = np.asarray(model.P, dtype=np.int64)
    if P.size:
        rows, parity = P % bank.N, P // bank.N
        mag = np.abs(model.c)
        for target, sel in ((cos_mass, parity == COS), (sin_mass, parity != COS)):
            np.add.at(target, bank.supports[rows[sel]].ravel(), np.repeat(mag[sel], bank.q))
    total = cos_mass + sin_mass
    s = total.sum()
    recovered = frozenset(np.flatnonzero(total >= tau * s).tolist()) if s > 0 else frozenset()
    return SupportReport(cos_mass, sin_mass, recovered, tau)
