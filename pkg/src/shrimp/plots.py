"""SVG figures from serialized traces and diagnostic CSVs."""
from __future__ import annotations

import csv
import json
import logging
import math
from pathlib import Path

import matplotlib

matplotlib.use("svg")
import matplotlib.pyplot as plt  # noqa: E402

log = logging.getLogger(__name__)

plt.rcParams["svg.hashsalt"] = "shrimp"  # stable element ids across runs


def spans_decades(values, decades: float = 3.0) -> bool:
    pos = [v for v in values if v > 0 and math.isfinite(v)]
    return bool(pos) and math.log10(max(pos) / min(pos)) >= decades


def _load_trace(path):
    try:
        payload = json.loads(Path(path).read_text())
    except (OSError, json.JSONDecodeError) as exc:
        log.warning("skipping trace %s: %s", path, exc)
        return None
    trace = payload.get("trace", payload)
    if not trace.get("steps"):
        log.warning("skipping trace %s: no steps", path)
        return None
    return trace


def mse_plot(trace_paths, out_path, title: str = "", key: str = "test_mse") -> int:
    """One polyline of ``key`` against N_t per trace. Returns the number drawn."""
    fig, ax = plt.subplots(figsize=(5, 3.5))
    drawn, ys = 0, []
    for path in trace_paths:
        tr = _load_trace(path)
        if tr is None:
            continue
        steps = [s for s in tr["steps"] if key in s]
        if not steps:
            log.warning("skipping trace %s: no %s values", path, key)
            continue
        x = [s["n_active"] for s in steps]
        y = [s[key] for s in steps]
        (line,) = ax.plot(x, y, marker=".", label=f"{tr.get('method', '?')} ({Path(path).stem})")
        line.set_gid(f"trace-{drawn}")
        ys.extend(y)
        drawn += 1
    ax.set_xscale("log")
    if spans_decades(ys):
        ax.set_yscale("log")
    ax.set_xlabel("number of active features $N_t$")
    ax.set_ylabel(key.replace("_", " "))
    if title:
        ax.set_title(title)
    if drawn:
        ax.legend(fontsize=6)
    fig.tight_layout()
    fig.savefig(out_path, format="svg")
    plt.close(fig)
    return drawn


def spectrum_plot(csv_paths, out_path) -> int:
    """lambda_max and lambda_min against N_t from spectrum CSVs."""
    fig, ax = plt.subplots(figsize=(5, 3.5))
    drawn, ys = 0, []
    for path in csv_paths:
        try:
            with open(path, newline="") as fh:
                rows = list(csv.DictReader(fh))
        except OSError as exc:
            log.warning("skipping spectrum %s: %s", path, exc)
            continue
        if not rows:
            continue
        n = [int(r["n_active"]) for r in rows]
        for col, style in (("lambda_max", "-"), ("lambda_min", "--")):
            y = [float(r[col]) for r in rows]
            (line,) = ax.plot(n, y, style, label=f"{rows[0]['method']} {col}")
            line.set_gid(f"spectrum-{drawn}-{col}")
            ys.extend(y)
        drawn += 1
    ax.set_xscale("log")
    if spans_decades(ys):
        ax.set_yscale("log")
    ax.set_xlabel("$N_t$")
    ax.set_ylabel("eigenvalue of scaled Gram")
    if drawn:
        ax.legend(fontsize=6)
    fig.tight_layout()
    fig.savefig(out_path, format="svg")
    plt.close(fig)
    return drawn


def support_plot(csv_path, out_path) -> None:
    """Grouped bars of cos and sin coefficient mass per coordinate."""
    with open(csv_path, newline="") as fh:
        rows = list(csv.DictReader(fh))
    idx = [int(r["coordinate"]) for r in rows]
    fig, ax = plt.subplots(figsize=(5, 3))
    ax.bar([i - 0.2 for i in idx], [float(r["cos_mass"]) for r in rows], 0.4, label="cos", gid="cos-mass")
    ax.bar([i + 0.2 for i in idx], [float(r["sin_mass"]) for r in rows], 0.4, label="sin", gid="sin-mass")
    ax.set_xticks(idx, [f"x{i + 1}" for i in idx])
    ax.set_ylabel("sum of |c|")
    ax.legend()
    fig.tight_layout()
    fig.savefig(out_path, format="svg")
    plt.close(fig)


def emit_plots(results_dir) -> list[Path]:
    """One MSE-vs-N_t SVG per (q, p, seed) group of traces, plus any spectrum/support CSVs found."""
    results_dir = Path(results_dir)
    out_dir = results_dir / "plots"
    out_dir.mkdir(exist_ok=True)
    written = []
    groups: dict = {}
    for path in sorted((results_dir / "traces").glob("*.json")):
        method, rest = path.stem.split("_q", 1)
        groups.setdefault(rest, []).append(path)
    for key, paths in sorted(groups.items()):
        target = out_dir / f"mse_q{key}.svg"
        if mse_plot(paths, target, title=f"q{key}"):
            written.append(target)
    spectra = sorted(results_dir.glob("spectrum*.csv"))
    if spectra:
        target = out_dir / "spectrum.svg"
        spectrum_plot(spectra, target)
        written.append(target)
    for path in sorted(results_dir.glob("support*.csv")):
        target = out_dir / f"{path.stem}.svg"
        support_plot(path, target)
        written.append(target)
    return written
