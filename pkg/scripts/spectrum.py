"""Extreme eigenvalues of the scaled Gram along SHRIMP and random-pruning traces on f7."""
from __future__ import annotations

import argparse
from dataclasses import dataclass
from pathlib import Path

from shrimp.baselines import random_prune_run
from shrimp.diagnostics import spectrum_through_pruning
from shrimp.features import design, sparse_bank
from shrimp.imp import imp_run
from shrimp.sampling import make_rng
from shrimp.synthetic import make_dataset


@dataclass
class SpectrumConfig:
    function: str = "f7"
    m: int = 200
    d: int = 10
    q: int = 2
    N: int = 1500
    sigma2: float | None = None  # 1/q
    p: float = 0.2
    seed: int = 0
    out: str = "results/spectrum"


def main(cfg: SpectrumConfig) -> None:
    out = Path(cfg.out)
    out.mkdir(parents=True, exist_ok=True)
    ds = make_dataset(cfg.function, cfg.m, cfg.d, cfg.seed)
    bank = sparse_bank(cfg.d, cfg.q, cfg.N, make_rng(cfg.seed, 1, cfg.q), cfg.sigma2)
    dm = design(bank, ds.X_train)
    kw = dict(X_test=ds.X_test, y_test=ds.y_test)
    for tr in (imp_run(dm, ds.y_train, ds.X_val, ds.y_val, cfg.p, **kw),
               random_prune_run(dm, ds.y_train, ds.X_val, ds.y_val, cfg.p, make_rng(cfg.seed, 2), **kw)):
        sp = spectrum_through_pruning(tr, dm)
        sp.to_csv(out / f"spectrum_{tr.method}.csv")
        print(f"{tr.method:13s} winner test {tr.winner.test_mse:.2e}; final lambda_max {sp.lam_max[-1]:.3g}")


if __name__ == "__main__":
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--sigma2", type=float)
    ap.add_argument("--out", default="results/spectrum")
    a = ap.parse_args()
    main(SpectrumConfig(seed=a.seed, sigma2=a.sigma2, out=a.out))
