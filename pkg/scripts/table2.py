"""Matched-order comparison on the synthetic targets (m=140, d=10, N=10000, p=20%).

    python scripts/table2.py --out results/table2 [--functions f1 f2 ...] [--dense]
"""
from __future__ import annotations

import argparse
from dataclasses import dataclass, field

from shrimp.experiment import ExperimentConfig, run_experiment
from shrimp.synthetic import REGISTRY


@dataclass
class Table2Config:
    functions: list[str] = field(default_factory=lambda: [f"f{i}" for i in range(1, 8)])
    methods: list[str] = field(default_factory=lambda: ["srfe_s", "min_l2", "salsa", "shrimp"])
    m: int = 140
    d: int = 10
    N: int = 10000
    seeds: list[int] = field(default_factory=lambda: [0, 1, 2])
    dense: bool = False  # q = d instead of the true order
    out: str = "results/table2"


def main(cfg: Table2Config, threads: int | None = None) -> None:
    print(f"{'function':8s} " + " ".join(f"{m:>10s}" for m in cfg.methods) + "   avg size")
    for fid in cfg.functions:
        q = cfg.d if cfg.dense else REGISTRY[fid].order(cfg.d)
        ec = ExperimentConfig(function=fid, m=cfg.m, d=cfg.d, N=cfg.N, q=[q], p=[20.0], seeds=cfg.seeds,
                              methods=cfg.methods, out=f"{cfg.out}/{fid}_q{q}")
        table = run_experiment(ec, threads)
        cells = " ".join(f"{table.mean_test(method=m):10.2e}" for m in cfg.methods)
        size = sum(r.n_winner for r in table.select(method="shrimp")) / len(cfg.seeds)
        print(f"{fid:8s} {cells}   {size:.1f}")


if __name__ == "__main__":
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--functions", nargs="+")
    ap.add_argument("--methods", nargs="+")
    ap.add_argument("--dense", action="store_true")
    ap.add_argument("--seeds", type=int, nargs="+")
    ap.add_argument("--out", default="results/table2")
    ap.add_argument("--threads", type=int)
    a = ap.parse_args()
    cfg = Table2Config(out=a.out, dense=a.dense)
    cfg.functions = a.functions or cfg.functions
    cfg.methods = a.methods or cfg.methods
    cfg.seeds = a.seeds or cfg.seeds
    main(cfg, a.threads)
