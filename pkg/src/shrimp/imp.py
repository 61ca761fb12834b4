"""Iterative magnitude pruning with min-norm refits, winner selection and prediction."""
from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from .errors import ParameterError
from .features import DesignMatrix, FeatureBank, design, feature_columns
from .solve import min_norm_lsq


@dataclass
class PrunedModel:
    P: np.ndarray  # active global column ids, ascending
    c: np.ndarray
    train_mse: float
    val_mse: float
    t: int
    test_mse: float = math.nan

    @property
    def size(self) -> int:
        return int(np.count_nonzero(self.c))


@dataclass
class ImpTrace:
    models: list[PrunedModel]
    winner_index: int
    prune_rate: float
    config: dict = field(default_factory=dict)
    method: str = "shrimp"

    @property
    def winner(self) -> PrunedModel:
        return self.models[self.winner_index]

    @property
    def sizes(self) -> list[int]:
        return [len(mod.P) for mod in self.models]

    def to_dict(self) -> dict:
        w = self.winner
        winner = {
            "t_star": w.t,
            "q": self.config.get("q"),
            "p": self.prune_rate,
            "sparsity": w.size,
        }
        if not math.isnan(w.test_mse):
            winner["test_mse"] = w.test_mse
        return {
            "method": self.method,
            "config": self.config,
            "steps": [
                {
                    "t": mod.t,
                    "n_active": len(mod.P),
                    "train_mse": mod.train_mse,
                    "val_mse": mod.val_mse,
                    **({} if math.isnan(mod.test_mse) else {"test_mse": mod.test_mse}),
                }
                for mod in self.models
            ],
            "winner": winner,
        }

    def to_json(self, **kw) -> str:
        return json.dumps(self.to_dict(), **kw)


def next_size(n: int, p: float) -> int:
    """Active-set size after one pruning round: ``round((1-p) n)``, at least 1, at most n-1."""
    return min(max(int(round((1.0 - p) * n)), 1), n - 1)


def schedule(n0: int, p: float, T: int | None = None) -> list[int]:
    sizes = [n0]
    while sizes[-1] > 1 and (T is None or len(sizes) <= T):
        sizes.append(next_size(sizes[-1], p))
    return sizes


def magnitude_keep(P: np.ndarray, c: np.ndarray, n_keep: int) -> np.ndarray:
    """Keep the ``n_keep`` largest-|c| ids of ``P``; among equal magnitudes the lower id goes first."""
    order = np.lexsort((P, np.abs(c)))  # ascending |c|, then ascending id
    return np.sort(P[order[len(P) - n_keep :]])


def _mse(A, c, y) -> float:
    if y is None:
        return math.nan
    return float(np.mean((A @ c - y) ** 2))


class _Evaluator:
    """Evaluates coefficient vectors on held-out splits via precomputed full designs."""

    def __init__(self, dm: DesignMatrix, X_val, y_val, X_test=None, y_test=None):
        self.columns = dm.columns
        self.val = design(dm.bank, X_val).A if X_val is not None else None
        self.y_val = None if y_val is None else np.asarray(y_val, float)
        self.test = design(dm.bank, X_test).A if X_test is not None and y_test is not None else None
        self.y_test = None if y_test is None else np.asarray(y_test, float)

    def __call__(self, P, c):
        val = _mse(self.val[:, P], c, self.y_val) if self.val is not None else math.nan
        test = _mse(self.test[:, P], c, self.y_test) if self.test is not None else math.nan
        return val, test


def _positions(dm: DesignMatrix, P: np.ndarray) -> np.ndarray:
    return np.searchsorted(dm.columns, P)


def select_winner(models: Sequence[PrunedModel]) -> int:
    """argmin of validation MSE; ties go to the later (sparser) model."""
    vals = np.array([mod.val_mse for mod in models])
    if np.all(np.isnan(vals)):
        return len(models) - 1
    best = np.nanmin(vals)
    return int(np.flatnonzero(vals == best)[-1])


def prune_loop(
    dm: DesignMatrix,
    y,
    X_val,
    y_val,
    p: float,
    choose_keep: Callable[[np.ndarray, np.ndarray, int], np.ndarray],
    *,
    refit: bool = True,
    T: int | None = None,
    X_test=None,
    y_test=None,
    rtol: float | None = None,
    method: str = "shrimp",
    config: dict | None = None,
) -> ImpTrace:
    """Shared pruning driver: fit, pick survivors, (re)fit, record, until one column is left.

    ``choose_keep(P, c, n_keep)`` returns the surviving ids. With ``refit=False``
    the survivors keep their initial coefficients (naive pruning).
    """
    if not 0 < p < 1:
        raise ParameterError(f"prune rate must be in (0, 1), got {p}")
    if len(dm) == 0:
        raise ParameterError("design has no active columns")
    y = np.asarray(y, dtype=float)
    ev = _Evaluator(dm, X_val, y_val, X_test, y_test)

    P = dm.columns.copy()
    c = min_norm_lsq(dm.A, y, rtol).c
    c0 = dict(zip(P.tolist(), c)) if not refit else None
    models = []
    t = 0
    while True:
        pos = _positions(dm, P)
        val, test = ev(P, c)
        models.append(PrunedModel(P, c, _mse(dm.A[:, pos], c, y), val, t, test))
        if len(P) == 1 or (T is not None and t >= T):
            break
        P = choose_keep(P, c, next_size(len(P), p))
        pos = _positions(dm, P)
        if refit:
            c = min_norm_lsq(dm.A[:, pos], y, rtol).c
        else:
            c = np.array([c0[i] for i in P.tolist()])
        t += 1
    return ImpTrace(models, select_winner(models), p, dict(config or {}), method)


def imp_run(dm: DesignMatrix, y, X_val, y_val, p: float, *, T=None, X_test=None, y_test=None, rtol=None, config=None) -> ImpTrace:
    """SHRIMP stage II: iterative magnitude pruning with min-norm refits."""
    cfg = {"q": dm.bank.q, "sigma2": dm.bank.sigma2, "N": dm.bank.N}
    cfg.update(config or {})
    return prune_loop(
        dm, y, X_val, y_val, p, magnitude_keep,
        T=T, X_test=X_test, y_test=y_test, rtol=rtol, method="shrimp", config=cfg,
    )


def select_model(traces: Sequence[ImpTrace]) -> tuple[ImpTrace, PrunedModel]:
    """Global validation argmin over traces; ties prefer smaller q, then larger t."""
    if not traces:
        raise ParameterError("empty trace grid")
    best = None
    for tr in traces:
        for mod in tr.models:
            key = (mod.val_mse, tr.config.get("q", 0), -mod.t)
            if best is None or key < best[0]:
                best = (key, tr, mod)
    return best[1], best[2]


def predict(model: PrunedModel, bank: FeatureBank, X) -> np.ndarray:
    """Evaluate only the model's columns on ``X`` and apply its coefficients."""
    if len(model.P) == 0:
        return np.zeros(np.atleast_2d(X).shape[0])
    return feature_columns(bank, X, model.P) @ model.c


def compression_stats(model: PrunedModel | None, bank: FeatureBank, s: int | None = None) -> tuple[int, int, float]:
    """Nonzeros of the compressed network ``(q+1) s`` vs the dense ``(d+1) N`` and their ratio."""
    if s is None:
        s = model.size
    nnz = (bank.q + 1) * s
    dense = (bank.d + 1) * bank.N
    return nnz, dense, nnz / dense
