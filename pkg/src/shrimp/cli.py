"""Command line entry point: ``shrimp {run,time,plot,ingest-check}``."""
from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path

from .errors import DataError, ParameterError
from .experiment import ExperimentConfig, ingest_csv, run_experiment, time_comparison, write_timing_csv
from .plots import emit_plots


def _config(args) -> ExperimentConfig:
    cfg = ExperimentConfig.from_json(args.config) if args.config else ExperimentConfig()
    sets = list(args.set or [])
    if args.seed is not None:
        sets.append(f"seeds=[{args.seed}]")
    if args.out:
        sets.append(f"out={args.out}")
    return cfg.with_overrides(sets)


def cmd_run(args) -> int:
    cfg = _config(args)
    table = run_experiment(cfg, args.threads)
    for (fn, meth, q, p), s in table.summary().items():
        print(f"{fn:10s} {meth:13s} q={q:<3d} p={p:<5g} mean test MSE {s['test_mse']:.3e}  mean size {s['n_winner']:.1f}")
    sel = table.selected_q()
    if sel:
        print("selected q (shrimp, by validation):", {f"{k[0]} p={k[1]:g} seed={k[2]}": v for k, v in sorted(sel.items())})
    failed = [r for r in table.rows if r.error]
    for r in failed:
        print(f"FAILED {r.method} q={r.q} p={r.p} seed={r.seed}: {r.error}", file=sys.stderr)
    print(f"wrote {Path(cfg.out) / 'results.csv'}")
    return 1 if failed else 0


def cmd_time(args) -> int:
    rows = time_comparison(args.m, args.N, function=args.function, d=args.d, q=args.q,
                           seed=args.seed or 0, repeats=args.repeats)
    out = Path(args.out or "timing")
    out.mkdir(parents=True, exist_ok=True)
    write_timing_csv(rows, out / "timing.csv")
    for r in rows:
        print(f"m={r.m:<6d} N={r.N:<7d} {r.method:8s} median {r.median_s:.3f}s")
    return 0


def cmd_plot(args) -> int:
    for path in emit_plots(args.results):
        print(path)
    return 0


def cmd_ingest_check(args) -> int:
    ds = ingest_csv(args.path, args.target, not args.raw, args.seed or 0)
    print(json.dumps({"name": ds.name, "d": ds.d, "train": len(ds.y_train), "val": len(ds.y_val), "test": len(ds.y_test)}))
    return 0


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="shrimp", description="Sparse random Fourier features with iterative magnitude pruning.")
    ap.add_argument("-v", "--verbose", action="store_true")
    sub = ap.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--seed", type=int)
        p.add_argument("--out")

    p = sub.add_parser("run", help="run an experiment grid")
    common(p)
    p.add_argument("--config", help="JSON config file")
    p.add_argument("--threads", type=int, help="worker threads (default: $SHRIMP_THREADS or 1)")
    p.add_argument("--set", action="append", metavar="KEY=VALUE", help="override a config key (repeatable)")
    p.set_defaults(func=cmd_run)

    p = sub.add_parser("time", help="solver timing, IMP vs basis pursuit")
    common(p)
    p.add_argument("--m", type=int, nargs="+", default=[1000])
    p.add_argument("--N", type=int, nargs="+", default=[2000, 8000])
    p.add_argument("--function", default="fs")
    p.add_argument("--d", type=int, default=5)
    p.add_argument("--q", type=int, default=1)
    p.add_argument("--repeats", type=int, default=3)
    p.set_defaults(func=cmd_time)

    p = sub.add_parser("plot", help="render SVG figures for a results directory")
    p.add_argument("results")
    p.set_defaults(func=cmd_plot)

    p = sub.add_parser("ingest-check", help="parse a CSV dataset and report its split sizes")
    common(p)
    p.add_argument("path")
    p.add_argument("--target", default="-1")
    p.add_argument("--raw", action="store_true", help="skip standardization")
    p.set_defaults(func=cmd_ingest_check)
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except (ParameterError, DataError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
