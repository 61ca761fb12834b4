"""Comparison fitters: random subsets, random and naive pruning, thresholded
basis pursuit (SRFE-S) and additive-kernel ridge regression (SALSA)."""
from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field

import numpy as np
import scipy.linalg
from scipy.special import gammaln, logsumexp

from .errors import ParameterError
from .features import DesignMatrix, design
from .imp import ImpTrace, PrunedModel, _Evaluator, _mse, _positions, prune_loop, schedule, select_winner
from .solve import min_norm_lsq

log = logging.getLogger(__name__)

# --------------------------------------------------------------------------
# pruning baselines


def min_l2_sweep(dm: DesignMatrix, y, sizes, rng: np.random.Generator, X_val=None, y_val=None, X_test=None, y_test=None, rtol=None) -> list[PrunedModel]:
    """Min-norm fits on uniformly random column subsets of each requested size."""
    y = np.asarray(y, dtype=float)
    ev = _Evaluator(dm, X_val, y_val, X_test, y_test)
    out = []
    for t, k in enumerate(sizes):
        if not 1 <= k <= len(dm):
            raise ParameterError(f"size {k} outside [1, {len(dm)}]")
        P = np.sort(rng.choice(dm.columns, size=k, replace=False))
        A = dm.A[:, _positions(dm, P)]
        c = min_norm_lsq(A, y, rtol).c
        val, test = ev(P, c)
        out.append(PrunedModel(P, c, _mse(A, c, y), val, t, test))
    return out


def random_prune_run(dm: DesignMatrix, y, X_val, y_val, p: float, rng: np.random.Generator, **kw) -> ImpTrace:
    """Same schedule and refits as SHRIMP, but survivors are drawn uniformly at random."""

    def keep(P, c, n_keep):
        return np.sort(rng.choice(P, size=n_keep, replace=False))

    cfg = {"q": dm.bank.q, "sigma2": dm.bank.sigma2, "N": dm.bank.N, **kw.pop("config", {})}
    return prune_loop(dm, y, X_val, y_val, p, keep, method="random_prune", config=cfg, **kw)


def naive_prune_run(dm: DesignMatrix, y, X_val, y_val, p: float, **kw) -> ImpTrace:
    """Magnitude pruning of the initial min-norm solution without refitting."""
    from .imp import magnitude_keep

    cfg = {"q": dm.bank.q, "sigma2": dm.bank.sigma2, "N": dm.bank.N, **kw.pop("config", {})}
    return prune_loop(dm, y, X_val, y_val, p, magnitude_keep, refit=False, method="naive_prune", config=cfg, **kw)


# --------------------------------------------------------------------------
# basis pursuit denoising


@dataclass
class BpdnProblem:
    """minimize ||c||_1 subject to ||A c - y||_2 <= eta sqrt(m); keep the s largest afterwards."""

    A: np.ndarray
    y: np.ndarray
    eta: float = 0.0
    s: int | None = None

    def __post_init__(self):
        self.A = np.asarray(self.A, dtype=float)
        self.y = np.asarray(self.y, dtype=float)
        if self.eta < 0:
            raise ParameterError(f"eta must be >= 0, got {self.eta}")
        if self.s is not None and self.s < 1:
            raise ParameterError(f"s must be >= 1, got {self.s}")

    @property
    def radius(self) -> float:
        return self.eta * math.sqrt(self.A.shape[0])


@dataclass
class BpdnResult:
    c: np.ndarray
    converged: bool
    iterations: int
    residual: float
    objective: float
    history: list[float] = field(default_factory=list, repr=False)
    gap: float = math.nan


def _soft(v, kappa):
    return np.sign(v) * np.maximum(np.abs(v) - kappa, 0.0)


def bpdn_solve(
    problem: BpdnProblem,
    tol: float = 1e-8,
    max_iter: int = 5000,
    rho: float = 1.0,
    alpha: float = 1.0,
    track: bool = False,
    check_every: int = 10,
) -> BpdnResult:
    """Scaled ADMM on ``min ||x||_1 + I(||z - y|| <= r)`` s.t. ``x = c``, ``z = A c``.

    The c-update solves ``(I + A^T A) c = b`` through a Cholesky factor of the
    m x m matrix ``I + A A^T``. ``alpha`` is the over-relaxation parameter.
    Converged means ``||A c - y|| <= r + tol ||y||`` and a relative duality gap
    at most ``tol``. With ``track=True`` the fixed-point residual
    ``||dx||^2 + ||dz||^2 + ||du||^2 + ||dv||^2`` is recorded every iteration;
    for alpha = 1 it is nonincreasing.
    """
    A, y, r = problem.A, problem.y, problem.radius
    m, k = A.shape
    ynorm = float(np.linalg.norm(y))
    if r >= ynorm:
        return BpdnResult(np.zeros(k), True, 0, ynorm, 0.0)

    G = A @ A.T
    chol = scipy.linalg.cho_factor(np.eye(m) + G)

    def project(v):
        n = np.linalg.norm(v)
        return v if n <= r else v * (r / n)

    x = np.zeros(k)
    z = np.zeros(m)
    u = np.zeros(k)
    v = np.zeros(m)
    history = []
    converged = False
    gap = math.inf
    it = 0
    for it in range(1, max_iter + 1):
        # c = (I + A^T A)^{-1} (x - u + A^T (z - v)) via the m x m factor; two products with A per iteration
        a = A @ (x - u)
        zv = z - v
        w = scipy.linalg.cho_solve(chol, a + G @ zv)
        c = (x - u) + A.T @ (zv - w)
        Ac = a + G @ (zv - w)
        c_hat = alpha * c + (1 - alpha) * x
        Ac_hat = alpha * Ac + (1 - alpha) * z
        prev = (x, z, u, v)
        x = _soft(c_hat + u, 1.0 / rho)
        z = y + project(Ac_hat + v - y)
        u = u + c_hat - x
        v = v + Ac_hat - z

        if track:
            history.append(float(sum(np.sum((a - b) ** 2) for a, b in zip((x, z, u, v), prev))))
        if it % check_every and it != max_iter:
            continue
        # certificate: feasibility of x plus a duality gap from the scaled multiplier
        viol = max(0.0, float(np.linalg.norm(A @ x - y)) - r)
        lam = -rho * v
        lam /= max(1.0, float(np.abs(A.T @ lam).max(initial=0.0)))
        obj = float(np.abs(x).sum())
        gap = (obj - (lam @ y - r * np.linalg.norm(lam))) / max(obj, 1e-300)
        if viol <= tol * ynorm and gap <= tol:
            converged = True
            break
    res = float(np.linalg.norm(A @ x - y))
    if not converged:
        log.warning("BPDN did not converge in %d iterations (residual %.3g, budget %.3g, gap %.2g)", max_iter, res, r, gap)
    return BpdnResult(x, converged, it, res, float(np.abs(x).sum()), history, float(gap))


def threshold_top_s(c, s: int) -> np.ndarray:
    """Zero all but the ``s`` largest-magnitude entries; ties keep the lower index."""
    c = np.asarray(c, dtype=float)
    if not 0 <= s <= c.size:
        raise ParameterError(f"s={s} outside [0, {c.size}]")
    out = np.zeros_like(c)
    if s == 0:
        return out
    order = np.lexsort((np.arange(c.size), -np.abs(c)))  # descending |c|, then ascending index
    keep = order[:s]
    out[keep] = c[keep]
    return out


def eta_grid(y) -> list[float]:
    y = np.asarray(y, dtype=float)
    scale = np.linalg.norm(y) / math.sqrt(y.size)
    return [0.0, 0.01 * scale, 0.1 * scale]


def srfe_s_run(dm: DesignMatrix, y, X_val, y_val, p: float, eta: float | None = 0.0, *, X_test=None, y_test=None, tol=1e-8, max_iter=5000, config=None) -> ImpTrace:
    """Thresholded basis pursuit evaluated along the pruning schedule.

    One BPDN solve; the model at step t keeps the ``N_t`` largest coefficients
    (no refit). ``eta=None`` picks eta from :func:`eta_grid` by validation.
    """
    y = np.asarray(y, dtype=float)
    etas = eta_grid(y) if eta is None else [eta]
    ev = _Evaluator(dm, X_val, y_val, X_test, y_test)
    best = None
    for e in etas:
        res = bpdn_solve(BpdnProblem(dm.A, y, e), tol=tol, max_iter=max_iter)
        models = []
        for t, s in enumerate(schedule(len(dm), p)):
            cs = threshold_top_s(res.c, s)
            nz = np.flatnonzero(cs)
            P, c = dm.columns[nz], cs[nz]
            val, test = ev(P, c)
            models.append(PrunedModel(P, c, _mse(dm.A[:, nz], c, y), val, t, test))
            if len(nz) == 0:
                break
        tr = ImpTrace(
            models, select_winner(models), p,
            {"q": dm.bank.q, "sigma2": dm.bank.sigma2, "N": dm.bank.N, "eta": e,
             "bpdn_converged": res.converged, "bpdn_iterations": res.iterations, **(config or {})},
            "srfe_s",
        )
        if best is None or tr.winner.val_mse < best.winner.val_mse:
            best = tr
    return best


# --------------------------------------------------------------------------
# additive Gaussian kernel and SALSA-style ridge


def _esp(G: np.ndarray, q: int) -> np.ndarray:
    """Elementary symmetric polynomial e_q over the last axis of ``G``."""
    e = np.zeros((q + 1,) + G.shape[:-1])
    e[0] = 1.0
    for k in range(G.shape[-1]):
        g = G[..., k]
        for j in range(min(k + 1, q), 0, -1):
            e[j] += g * e[j - 1]
    return e[q]


def _log_esp(logG: np.ndarray, q: int) -> np.ndarray:
    e = np.full((q + 1,) + logG.shape[:-1], -np.inf)
    e[0] = 0.0
    for k in range(logG.shape[-1]):
        lg = logG[..., k]
        for j in range(min(k + 1, q), 0, -1):
            e[j] = np.logaddexp(e[j], lg + e[j - 1])
    return e[q]


def additive_kernel_matrix(X, X2, q: int, sigma2: float | None = None, normalize: bool = False) -> np.ndarray:
    """``K_ij = sum_{|S|=q} exp(-sigma2 ||x_i|S - x2_j|S||^2 / 2)`` with sigma2 = 1/q by default.

    Evaluated as ``e_q(g_1, ..., g_d)`` of the per-coordinate factors
    ``g_k = exp(-sigma2 (x_ik - x2_jk)^2 / 2)``. ``normalize`` divides by C(d, q).
    Uses a log-space recurrence when q > 30.
    """
    X = np.atleast_2d(np.asarray(X, dtype=float))
    X2 = np.atleast_2d(np.asarray(X2, dtype=float))
    d = X.shape[1]
    if X2.shape[1] != d:
        raise ParameterError("X and X2 must have the same number of columns")
    if not 1 <= q <= d:
        raise ParameterError(f"need 1 <= q <= d, got q={q}, d={d}")
    if sigma2 is None:
        sigma2 = 1.0 / q
    logG = -0.5 * sigma2 * (X[:, None, :] - X2[None, :, :]) ** 2
    if q > 30:
        logK = _log_esp(logG, q)
        if normalize:
            logK = logK - (gammaln(d + 1) - gammaln(q + 1) - gammaln(d - q + 1))
        return np.exp(logK)
    K = _esp(np.exp(logG), q)
    if normalize:
        K = K / math.comb(d, q)
    return K


SALSA_LAMBDAS = (1e-8, 1e-6, 1e-4, 1e-2, 1.0)


@dataclass
class SalsaModel:
    X: np.ndarray
    alpha: np.ndarray
    q: int
    lam: float
    val_mse: float
    normalize: bool = False
    train_mse: float = math.nan

    def predict(self, X) -> np.ndarray:
        return additive_kernel_matrix(X, self.X, self.q, normalize=self.normalize) @ self.alpha


def _kernel_solve(K, y, lam):
    M = K + lam * np.eye(K.shape[0])
    try:
        return scipy.linalg.solve(M, y, assume_a="pos")
    except (np.linalg.LinAlgError, scipy.linalg.LinAlgError):
        log.warning("kernel system ill-conditioned at lambda=%g; adding 1e-10 jitter", lam)
        return scipy.linalg.solve(M + 1e-10 * np.eye(K.shape[0]), y)


def salsa_fit(X, y, X_val, y_val, q: int, lambda_grid=SALSA_LAMBDAS, normalize: bool = False) -> SalsaModel:
    """Dual kernel ridge ``(K + lam I) alpha = y`` per lambda, winner by validation MSE."""
    if len(lambda_grid) == 0:
        raise ParameterError("lambda grid is empty")
    X = np.atleast_2d(np.asarray(X, dtype=float))
    y = np.asarray(y, dtype=float)
    K = additive_kernel_matrix(X, X, q, normalize=normalize)
    Kv = additive_kernel_matrix(X_val, X, q, normalize=normalize)
    best = None
    for lam in lambda_grid:
        alpha = _kernel_solve(K, y, lam)
        val = float(np.mean((Kv @ alpha - y_val) ** 2))
        if best is None or val < best.val_mse:
            best = SalsaModel(X, alpha, q, lam, val, normalize, float(np.mean((K @ alpha - y) ** 2)))
    return best
