"""Support and cos/sin parity recovery on fs = 3cos(x3) + 4sin(x4) + 2sin(x2) (d=5, q=1)."""
from __future__ import annotations

import argparse
from dataclasses import dataclass
from pathlib import Path

from shrimp.diagnostics import support_report
from shrimp.features import design, sparse_bank
from shrimp.imp import imp_run
from shrimp.sampling import make_rng
from shrimp.synthetic import make_dataset


@dataclass
class SupportConfig:
    m: int = 1000
    d: int = 5
    N: int = 10000
    p: float = 0.2
    seed: int = 0
    checkpoints: tuple[int, ...] = (20000, 8192, 879, 38)
    out: str = "results/support"


def main(cfg: SupportConfig) -> None:
    out = Path(cfg.out)
    out.mkdir(parents=True, exist_ok=True)
    ds = make_dataset("fs", cfg.m, cfg.d, cfg.seed)
    bank = sparse_bank(cfg.d, 1, cfg.N, make_rng(cfg.seed, 1, 1), 1.0)
    dm = design(bank, ds.X_train)
    tr = imp_run(dm, ds.y_train, ds.X_val, ds.y_val, cfg.p, X_test=ds.X_test, y_test=ds.y_test)
    (out / "trace.json").write_text(tr.to_json())
    for mod in tr.models:
        if len(mod.P) in cfg.checkpoints or mod is tr.winner:
            rep = support_report(mod, bank)
            tag = "winner" if mod is tr.winner else f"N{len(mod.P)}"
            rep.to_csv(out / f"support_{tag}.csv")
            print(f"N_t={len(mod.P):6d} test {mod.test_mse:.2e} support "
                  f"{sorted(f'x{i + 1}' for i in rep.recovered)} parity {rep.dominant_parity()}")


if __name__ == "__main__":
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--out", default="results/support")
    a = ap.parse_args()
    main(SupportConfig(seed=a.seed, out=a.out))
