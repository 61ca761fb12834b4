"""SHRIMP vs plain min-l2 at weight variances 1/q, 1 and 100 (d=10, m=200, N=1500, 10 trials)."""
from __future__ import annotations

import argparse
from dataclasses import dataclass, field

from shrimp.experiment import ExperimentConfig, run_experiment
from shrimp.synthetic import REGISTRY


@dataclass
class VarianceConfig:
    functions: list[str] = field(default_factory=lambda: ["fa1", "fa2", "fa3"])
    variances: list = field(default_factory=lambda: ["inv_q", 1.0, 100.0])
    trials: int = 10
    out: str = "results/variance"


def main(cfg: VarianceConfig) -> None:
    for fid in cfg.functions:
        q = REGISTRY[fid].order(10)
        for s2 in cfg.variances:
            ec = ExperimentConfig(function=fid, m=200, d=10, N=1500, q=[q], p=[20.0], sigma2=s2,
                                  seeds=list(range(cfg.trials)), methods=["min_l2", "shrimp"],
                                  out=f"{cfg.out}/{fid}_{s2}")
            t = run_experiment(ec)
            print(f"{fid} sigma2={s2!s:6s} min-l2 {t.mean_test(method='min_l2'):.3e}  shrimp {t.mean_test(method='shrimp'):.3e}")


if __name__ == "__main__":
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--trials", type=int, default=10)
    ap.add_argument("--out", default="results/variance")
    a = ap.parse_args()
    main(VarianceConfig(trials=a.trials, out=a.out))
