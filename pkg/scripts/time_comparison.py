"""Solver wall time of SHRIMP against basis pursuit over a grid of (m, N)."""
from __future__ import annotations

import argparse
from dataclasses import dataclass, field
from pathlib import Path

from shrimp.experiment import time_comparison, write_timing_csv


@dataclass
class TimingConfig:
    ms: list[int] = field(default_factory=lambda: [250, 500, 1000])
    Ns: list[int] = field(default_factory=lambda: [1000, 2000, 4000, 8000])
    repeats: int = 3
    out: str = "results/timing"


def main(cfg: TimingConfig) -> None:
    rows = time_comparison(cfg.ms, cfg.Ns, repeats=cfg.repeats)
    Path(cfg.out).mkdir(parents=True, exist_ok=True)
    write_timing_csv(rows, Path(cfg.out) / "timing.csv")
    for r in rows:
        print(f"m={r.m:5d} N={r.N:6d} {r.method:7s} {r.median_s:8.3f}s")


if __name__ == "__main__":
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--m", type=int, nargs="+")
    ap.add_argument("--N", type=int, nargs="+")
    ap.add_argument("--repeats", type=int, default=3)
    ap.add_argument("--out", default="results/timing")
    a = ap.parse_args()
    cfg = TimingConfig(repeats=a.repeats, out=a.out)
    cfg.ms = a.m or cfg.ms
    cfg.Ns = a.N or cfg.Ns
    main(cfg)
