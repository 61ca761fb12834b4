"""Synthetic low-order targets and dataset generation.

Formulas use 1-based coordinate names (``x1`` is ``X[:, 0]``).
"""
from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Callable

import numpy as np

from .errors import ParameterError
from .sampling import make_rng


@dataclass(frozen=True)
class TargetFunction:
    id: str
    fn: Callable[[np.ndarray], np.ndarray]
    d_min: int
    q_star: int | None  # None: order equals d
    box: float  # samples are Unif[-box, box]^d
    formula: str

    def __call__(self, X) -> np.ndarray:
        return evaluate(self, X)

    def order(self, d: int) -> int:
        return d if self.q_star is None else self.q_star


def _x(X, i):
    return X[:, i - 1]


def _f1(X):
    return X[:, :-1].sum(axis=1) + np.exp(-X[:, -1])


def _f2(X):
    return np.cos(_x(X, 1)) + np.sin(_x(X, 2))


def _f3(X):
    return (2 * _x(X, 1) - 1) * (2 * _x(X, 2) - 1)


def _f4(X):
    a, b, c = (2 * _x(X, i) - 1 for i in (1, 2, 3))
    return a * b + a * c + b * c


def _f5(X):
    # np.sinc is the normalized sinc sin(pi t) / (pi t)
    return np.sinc(_x(X, 1)) * np.sinc(_x(X, 3)) ** 3 + np.sinc(_x(X, 2))


def _f6(X):
    x1, x2, x3 = _x(X, 1), _x(X, 2), _x(X, 3)
    return np.sin(x1) + 7 * np.sin(x2) ** 2 + 0.1 * x3**4 * np.sin(x1)


def _f7(X):
    return np.cos(_x(X, 1)) * _x(X, 3) + _x(X, 2) ** 2 * _x(X, 4) + X[:, 2:].sum(axis=1)


def _fs(X):
    return 3 * np.cos(_x(X, 3)) + 4 * np.sin(_x(X, 4)) + 2 * np.sin(_x(X, 2))


def _fa2(X):
    return np.cos(_x(X, 1) + _x(X, 2)) + 5 * np.cos(2 * _x(X, 3) + 10 * _x(X, 4))


def _fa3(X):
    return np.sin(9 * _x(X, 1)) + 10 * np.cos(10 * _x(X, 2))


def _fh1(X):
    return np.sin(X.sum(axis=1))


def _fh2(X):
    return np.cos(np.prod(X, axis=1))


def _fh3(X):
    return (1 + np.linalg.norm(X, axis=1)) ** -0.5


def _fk(X):
    return _x(X, 4) ** 2 + _x(X, 2) * _x(X, 3) + _x(X, 1) * _x(X, 2) + _x(X, 4)


_T = TargetFunction
REGISTRY: dict[str, TargetFunction] = {
    t.id: t
    for t in [
        _T("f1", _f1, 1, 1, 1.0, "sum_{i<d} x_i + exp(-x_d)"),
        _T("f2", _f2, 2, 1, 1.0, "cos(x1) + sin(x2)"),
        _T("f3", _f3, 2, 2, 1.0, "(2x1-1)(2x2-1)"),
        _T("f4", _f4, 3, 2, 1.0, "(2x1-1)(2x2-1) + (2x1-1)(2x3-1) + (2x2-1)(2x3-1)"),
        _T("f5", _f5, 3, 3, 1.0, "sinc(x1) sinc(x3)^3 + sinc(x2)"),
        _T("f6", _f6, 3, 2, math.pi, "sin(x1) + 7 sin^2(x2) + 0.1 x3^4 sin(x1)"),
        _T("f7", _f7, 4, 2, 1.0, "cos(x1) x3 + x2^2 x4 + sum_{i>=3} x_i"),
        _T("fs", _fs, 4, 1, 1.0, "3cos(x3) + 4sin(x4) + 2sin(x2)"),
        _T("fa1", _f7, 4, 2, 1.0, "cos(x1) x3 + x2^2 x4 + sum_{j>=3} x_j"),
        _T("fa2", _fa2, 4, 2, 1.0, "cos(x1 + x2) + 5cos(2x3 + 10x4)"),
        _T("fa3", _fa3, 2, 1, 1.0, "sin(9x1) + 10cos(10x2)"),
        _T("fh1", _fh1, 1, None, 1.0, "sin(sum x_i)"),
        _T("fh2", _fh2, 1, None, 1.0, "cos(prod x_i)"),
        _T("fh3", _fh3, 1, None, 1.0, "(1 + ||x||_2)^(-1/2)"),
        _T("fk", _fk, 4, 2, 1.0, "x4^2 + x2 x3 + x1 x2 + x4"),
    ]
}
REGISTRY["ishigami"] = REGISTRY["f6"]


def get(fid: str | TargetFunction) -> TargetFunction:
    if isinstance(fid, TargetFunction):
        return fid
    try:
        return REGISTRY[fid]
    except KeyError:
        raise ParameterError(f"unknown target function {fid!r}; known: {sorted(REGISTRY)}") from None


def evaluate(f: str | TargetFunction, X) -> np.ndarray:
    f = get(f)
    X = np.atleast_2d(np.asarray(X, dtype=float))
    if X.shape[1] < f.d_min:
        raise ParameterError(f"{f.id} needs d >= {f.d_min}, got {X.shape[1]}")
    return f.fn(X)


@dataclass
class Dataset:
    X_train: np.ndarray
    y_train: np.ndarray
    X_val: np.ndarray
    y_val: np.ndarray
    X_test: np.ndarray
    y_test: np.ndarray
    noise: float = 0.0
    seed: int | None = None
    name: str = ""

    @property
    def d(self) -> int:
        return self.X_train.shape[1]

    def save(self, directory) -> None:
        directory = Path(directory)
        directory.mkdir(parents=True, exist_ok=True)
        for split in ("train", "val", "test"):
            write_csv(directory / f"{split}.csv", getattr(self, f"X_{split}"), getattr(self, f"y_{split}"))

    @classmethod
    def load(cls, directory, **kw) -> "Dataset":
        directory = Path(directory)
        parts = [read_csv(directory / f"{split}.csv") for split in ("train", "val", "test")]
        return cls(*(a for pair in parts for a in pair), **kw)


def split_train_val(n: int, rng: np.random.Generator, val_frac: float = 0.1) -> tuple[np.ndarray, np.ndarray]:
    """Shuffled 90/10 index split."""
    perm = rng.permutation(n)
    n_val = max(1, int(round(val_frac * n)))
    return np.sort(perm[n_val:]), np.sort(perm[:n_val])


def make_dataset(f: str | TargetFunction, m: int, d: int, seed: int, noise: float = 0.0, val_frac: float = 0.1) -> Dataset:
    """``m`` uniform samples split 90/10 into train/val, plus ``m`` independent test samples."""
    f = get(f)
    if m < 10:
        raise ParameterError(f"need m >= 10, got {m}")
    if d < f.d_min:
        raise ParameterError(f"{f.id} needs d >= {f.d_min}, got {d}")
    rng = make_rng(seed, 0)
    X = rng.uniform(-f.box, f.box, size=(m, d))
    X_test = rng.uniform(-f.box, f.box, size=(m, d))
    y, y_test = evaluate(f, X), evaluate(f, X_test)
    if noise > 0:
        y = y + rng.normal(0.0, noise, size=m)
        y_test = y_test + rng.normal(0.0, noise, size=m)
    tr, va = split_train_val(m, rng, val_frac)
    return Dataset(X[tr], y[tr], X[va], y[va], X_test, y_test, noise, seed, f.id)


def write_csv(path, X, y) -> None:
    X = np.atleast_2d(np.asarray(X, dtype=float))
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow([f"x{i}" for i in range(X.shape[1])] + ["y"])
        for row, target in zip(X, np.asarray(y, dtype=float)):
            w.writerow([repr(float(v)) for v in row] + [repr(float(target))])


def read_csv(path) -> tuple[np.ndarray, np.ndarray]:
    with open(path, newline="") as fh:
        rows = list(csv.reader(fh))
    data = np.array([[float(v) for v in r] for r in rows[1:]], dtype=float).reshape(len(rows) - 1, len(rows[0]))
    return data[:, :-1], data[:, -1]
