"""Monte Carlo check of the expected extreme-eigenvalue bounds for the complex Fourier Gram."""
from __future__ import annotations

import argparse
from dataclasses import dataclass

from shrimp.diagnostics import kernel_entry_check, verify_prop1
from shrimp.sampling import make_rng


@dataclass
class Prop1Config:
    gamma2: float = 1.0
    sigma2: float = 1.0
    q: int = 2
    m: int = 10
    N: int = 20
    trials: int = 200
    seed: int = 0


def main(cfg: Prop1Config) -> None:
    rep = verify_prop1(cfg.gamma2, cfg.sigma2, cfg.q, cfg.m, cfg.N, cfg.trials, make_rng(cfg.seed))
    b = rep.bounds
    print(f"lambda_1: mean {rep.lam1_mean:.4f} +- {rep.lam1_se:.4f}, lower bound {b.lam1_lower:.4f} -> {'ok' if rep.lam1_ok else 'VIOLATED'}")
    print(f"lambda_m: mean {rep.lamm_mean:.4f} +- {rep.lamm_se:.4f}, upper bound {b.lamm_upper:.4f} -> {'ok' if rep.lamm_ok else 'VIOLATED'}")
    mean, se, target = kernel_entry_check([0.7, -0.2], cfg.sigma2, 100_000, make_rng(cfg.seed, 1))
    print(f"kernel entry: {mean:.4f} +- {se:.4f} vs exp(-sigma2 |delta|^2 / 2) = {target:.4f}")
    full = verify_prop1(1.0, 1.0, 20, 20, 24, 60, make_rng(cfg.seed, 2))
    print(f"q=d=20, m=20, N=24: mean lambda_1 {full.lam1_mean:.3f}, mean lambda_m {full.lamm_mean:.4f}")


if __name__ == "__main__":
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--q", type=int, default=2)
    ap.add_argument("--trials", type=int, default=200)
    ap.add_argument("--seed", type=int, default=0)
    a = ap.parse_args()
    main(Prop1Config(q=a.q, trials=a.trials, seed=a.seed))
