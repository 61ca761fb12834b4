"""Experiment grids: config, CSV ingestion, per-cell runs, result tables and timing."""
from __future__ import annotations

import csv
import hashlib
import json
import logging
import math
import os
import statistics
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field, fields
from pathlib import Path

import numpy as np

from . import baselines, synthetic
from .errors import DataError, ParameterError
from .features import design, sparse_bank
from .imp import ImpTrace, imp_run, schedule, select_winner
from .sampling import make_rng
from .synthetic import Dataset

log = logging.getLogger(__name__)

METHODS = ("shrimp", "min_l2", "random_prune", "naive_prune", "srfe_s", "salsa")
CSV_HEADER = ("function", "method", "q", "p", "seed", "n_winner", "val_mse", "test_mse", "wall_ms")

# stream ids under each seed
_DATA, _BANK, _AUX = 0, 1, 2


@dataclass
class ExperimentConfig:
    mode: str = "synthetic"  # or "csv"
    function: str = "f3"
    data_path: str | None = None
    target: str | int = -1
    m: int = 140
    d: int = 10
    q: list[int] = field(default_factory=lambda: [2])
    p: list[float] = field(default_factory=lambda: [20.0])  # percent
    N: int = 10000
    sigma2: str | float = "inv_q"
    seeds: list[int] = field(default_factory=lambda: [0, 1, 2])
    methods: list[str] = field(default_factory=lambda: ["shrimp"])
    out: str = "results"
    noise: float = 0.0
    standardize: bool = True
    bpdn_max_iter: int = 5000
    srfe_eta: float | None = 0.0

    def __post_init__(self):
        for name in ("q", "p", "seeds", "methods"):
            v = getattr(self, name)
            if not isinstance(v, (list, tuple)):
                v = [v]
            if len(v) == 0:
                raise ParameterError(f"{name} must be a nonempty list")
            setattr(self, name, list(v))
        if self.mode not in ("synthetic", "csv"):
            raise ParameterError(f"unknown mode {self.mode!r}")
        if self.mode == "csv" and not self.data_path:
            raise ParameterError("csv mode needs data_path")
        if any(not 0 < p < 100 for p in self.p):
            raise ParameterError(f"p values must lie in (0, 100), got {self.p}")
        if any(q < 1 for q in self.q):
            raise ParameterError(f"q values must be >= 1, got {self.q}")
        bad = set(self.methods) - set(METHODS)
        if bad:
            raise ParameterError(f"unknown methods {sorted(bad)}")
        self.sigma2_for(1)

    def sigma2_for(self, q: int) -> float:
        if self.sigma2 == "inv_q":
            return 1.0 / q
        v = float(self.sigma2)
        if not v > 0:
            raise ParameterError(f"sigma2 must be positive or 'inv_q', got {self.sigma2!r}")
        return v

    @property
    def name(self) -> str:
        return Path(self.data_path).stem if self.mode == "csv" else self.function

    def to_dict(self) -> dict:
        return asdict(self)

    def digest(self) -> str:
        """Hash of everything that affects results (the output location does not)."""
        payload = {k: v for k, v in self.to_dict().items() if k != "out"}
        return hashlib.sha256(json.dumps(payload, sort_keys=True).encode()).hexdigest()[:16]

    @classmethod
    def from_dict(cls, data: dict) -> "ExperimentConfig":
        known = {f.name for f in fields(cls)}
        extra = set(data) - known
        if extra:
            raise ParameterError(f"unknown config keys {sorted(extra)}")
        return cls(**data)

    @classmethod
    def from_json(cls, path) -> "ExperimentConfig":
        with open(path) as fh:
            return cls.from_dict(json.load(fh))

    def with_overrides(self, assignments) -> "ExperimentConfig":
        """Apply ``key=value`` strings; values parse as JSON, falling back to plain strings."""
        data = self.to_dict()
        for item in assignments or ():
            key, sep, raw = item.partition("=")
            if not sep:
                raise ParameterError(f"override must look like key=value, got {item!r}")
            try:
                value = json.loads(raw)
            except json.JSONDecodeError:
                value = raw
            data[key.strip()] = value
        return self.from_dict(data)


# --------------------------------------------------------------------------
# data


def ingest_csv(path, target: str | int = -1, standardize: bool = True, seed: int = 0, val_frac: float = 0.1, test_frac: float = 0.0) -> Dataset:
    """Read a numeric CSV with a header row into a train/val(/test) split.

    Rows with missing values are dropped with a warning. Standardization uses
    training statistics only. With ``test_frac == 0`` the test split is the
    validation split.
    """
    path = Path(path)
    if not path.exists():
        raise DataError(f"no such file: {path}")
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise DataError(f"{path} is empty") from None
        rows, dropped = [], 0
        for line_no, row in enumerate(reader, start=2):
            if not row:
                continue
            if len(row) != len(header):
                raise DataError(f"{path}:{line_no}: expected {len(header)} cells, got {len(row)}")
            vals = []
            for cell in row:
                cell = cell.strip()
                if cell == "" or cell.lower() in ("nan", "na", "?"):
                    vals.append(math.nan)
                    continue
                try:
                    vals.append(float(cell))
                except ValueError:
                    raise DataError(f"{path}:{line_no}: non-numeric cell {cell!r}") from None
            if any(math.isnan(v) for v in vals):
                dropped += 1
                continue
            rows.append(vals)
    if dropped:
        log.warning("dropped %d row(s) with missing values from %s", dropped, path)
    if not rows:
        raise DataError(f"{path} has no complete rows")
    data = np.array(rows, dtype=float)
    if isinstance(target, str) and not target.lstrip("-").isdigit():
        if target not in header:
            raise DataError(f"target column {target!r} not in header")
        ti = header.index(target)
    else:
        ti = int(target) % len(header)
    y = data[:, ti]
    X = np.delete(data, ti, axis=1)

    rng = make_rng(seed, _DATA)
    n = len(y)
    perm = rng.permutation(n)
    n_test = int(round(test_frac * n))
    test_idx, rest = np.sort(perm[:n_test]), perm[n_test:]
    n_val = max(1, int(round(val_frac * len(rest)))) if len(rest) > 1 else 0
    val_idx, tr_idx = np.sort(rest[:n_val]), np.sort(rest[n_val:])
    if n_test == 0:
        test_idx = val_idx
    if standardize:
        mu = X[tr_idx].mean(axis=0)
        sd = X[tr_idx].std(axis=0)
        sd[sd == 0] = 1.0
        X = (X - mu) / sd
    return Dataset(X[tr_idx], y[tr_idx], X[val_idx], y[val_idx], X[test_idx], y[test_idx], 0.0, seed, path.stem)


def load_data(cfg: ExperimentConfig, seed: int) -> Dataset:
    if cfg.mode == "csv":
        return ingest_csv(cfg.data_path, cfg.target, cfg.standardize, seed)
    return synthetic.make_dataset(cfg.function, cfg.m, cfg.d, seed, cfg.noise)


# --------------------------------------------------------------------------
# cells


@dataclass
class CellResult:
    function: str
    method: str
    q: int
    p: float
    seed: int
    n_winner: int
    val_mse: float
    test_mse: float
    wall_ms: float
    trace: dict = field(default_factory=dict)
    error: str | None = None

    def row(self) -> list:
        return [self.function, self.method, self.q, self.p, self.seed, self.n_winner,
                repr(float(self.val_mse)), repr(float(self.test_mse)), f"{self.wall_ms:.3f}"]


def _min_l2_trace(dm, ds, p, rng, cfg) -> ImpTrace:
    """Random-subset sweep along the pruning schedule; the reported model is the full t=0 fit."""
    sizes = schedule(len(dm), p)
    models = baselines.min_l2_sweep(dm, ds.y_train, sizes, rng, ds.X_val, ds.y_val, ds.X_test, ds.y_test)
    return ImpTrace(models, 0, p, cfg, "min_l2")


def _salsa_trace(ds, q, p, cfg) -> ImpTrace:
    from .imp import PrunedModel

    mod = baselines.salsa_fit(ds.X_train, ds.y_train, ds.X_val, ds.y_val, q)
    test = float(np.mean((mod.predict(ds.X_test) - ds.y_test) ** 2))
    pm = PrunedModel(np.arange(len(ds.y_train)), mod.alpha, mod.train_mse, mod.val_mse, 0, test)
    return ImpTrace([pm], 0, p, {**cfg, "lambda": mod.lam}, "salsa")


def run_cell(cfg: ExperimentConfig, method: str, q: int, p_pct: float, seed: int, ds: Dataset | None = None) -> CellResult:
    """One (method, q, p, seed) cell. The bank depends only on (seed, q) so methods share it."""
    t0 = time.perf_counter()
    p = p_pct / 100.0
    base = {"function": cfg.name, "method": method, "q": q, "p": p_pct, "seed": seed}
    try:
        ds = ds if ds is not None else load_data(cfg, seed)
        meta = {"q": q, "sigma2": cfg.sigma2_for(q), "N": cfg.N, "seed": seed, "m": len(ds.y_train) + len(ds.y_val), "d": ds.d}
        if method == "salsa":
            trace = _salsa_trace(ds, q, p, meta)
        else:
            bank = sparse_bank(ds.d, q, cfg.N, make_rng(seed, _BANK, q), cfg.sigma2_for(q))
            dm = design(bank, ds.X_train)
            kw = dict(X_test=ds.X_test, y_test=ds.y_test)
            aux = make_rng(seed, _AUX, q, int(round(p_pct * 1000)))
            if method == "shrimp":
                trace = imp_run(dm, ds.y_train, ds.X_val, ds.y_val, p, config=meta, **kw)
            elif method == "random_prune":
                trace = baselines.random_prune_run(dm, ds.y_train, ds.X_val, ds.y_val, p, aux, config=meta, **kw)
            elif method == "naive_prune":
                trace = baselines.naive_prune_run(dm, ds.y_train, ds.X_val, ds.y_val, p, config=meta, **kw)
            elif method == "min_l2":
                trace = _min_l2_trace(dm, ds, p, aux, meta)
            elif method == "srfe_s":
                trace = baselines.srfe_s_run(dm, ds.y_train, ds.X_val, ds.y_val, p, cfg.srfe_eta,
                                             max_iter=cfg.bpdn_max_iter, config=meta, **kw)
            else:
                raise ParameterError(f"unknown method {method!r}")
        w = trace.winner
        ms = 1000 * (time.perf_counter() - t0)
        return CellResult(**base, n_winner=w.size, val_mse=w.val_mse, test_mse=w.test_mse, wall_ms=ms, trace=trace.to_dict())
    except Exception as exc:  # a failed cell must not stop the grid
        log.exception("cell %s failed", base)
        ms = 1000 * (time.perf_counter() - t0)
        err = f"{type(exc).__name__}: {exc}"
        return CellResult(**base, n_winner=-1, val_mse=math.nan, test_mse=math.nan, wall_ms=ms,
                          trace={"method": method, "error": err}, error=err)


# --------------------------------------------------------------------------
# grid


@dataclass
class ResultTable:
    rows: list[CellResult] = field(default_factory=list)

    def write_csv(self, path) -> None:
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(CSV_HEADER)
            for r in sorted(self.rows, key=_cell_key):
                w.writerow(r.row())

    @classmethod
    def read_csv(cls, path) -> "ResultTable":
        out = []
        with open(path, newline="") as fh:
            for r in csv.DictReader(fh):
                out.append(CellResult(r["function"], r["method"], int(r["q"]), float(r["p"]), int(r["seed"]),
                                      int(r["n_winner"]), float(r["val_mse"]), float(r["test_mse"]), float(r["wall_ms"])))
        return cls(out)

    def select(self, **where) -> list[CellResult]:
        return [r for r in self.rows if all(getattr(r, k) == v for k, v in where.items())]

    def mean_test(self, **where) -> float:
        vals = [r.test_mse for r in self.select(**where)]
        return float(np.mean(vals)) if vals else math.nan

    def summary(self) -> dict:
        """Mean test MSE and winner size over seeds for each (function, method, q, p)."""
        groups: dict = {}
        for r in self.rows:
            groups.setdefault((r.function, r.method, r.q, r.p), []).append(r)
        return {
            k: {"test_mse": float(np.mean([r.test_mse for r in v])),
                "n_winner": float(np.mean([r.n_winner for r in v])), "seeds": len(v)}
            for k, v in sorted(groups.items())
        }

    def selected_q(self, method: str = "shrimp") -> dict:
        """Per (function, p, seed): the q whose winner has the lowest validation MSE (ties: smaller q)."""
        best: dict = {}
        for r in self.rows:
            if r.method != method or math.isnan(r.val_mse):
                continue
            k = (r.function, r.p, r.seed)
            if k not in best or (r.val_mse, r.q) < (best[k].val_mse, best[k].q):
                best[k] = r
        return {k: v.q for k, v in best.items()}


def _cell_key(r: CellResult):
    return (r.function, METHODS.index(r.method) if r.method in METHODS else 99, r.q, r.p, r.seed)


def _cell_file(out: Path, method, q, p, seed) -> Path:
    return out / "traces" / f"{method}_q{q}_p{p:g}_s{seed}.json"


def resolve_threads(threads: int | None) -> int:
    if threads is None:
        env = os.environ.get("SHRIMP_THREADS")
        threads = int(env) if env else 1
    return max(1, int(threads))


def run_experiment(cfg: ExperimentConfig, threads: int | None = None) -> ResultTable:
    """Run every (method, q, p, seed) cell, writing one JSON trace per cell and ``results.csv``.

    Cells whose trace file exists for the same config digest are loaded, not rerun.
    """
    out = Path(cfg.out)
    (out / "traces").mkdir(parents=True, exist_ok=True)
    digest = cfg.digest()
    (out / "config.json").write_text(json.dumps({**cfg.to_dict(), "digest": digest}, indent=2, sort_keys=True))

    cells = [(meth, q, p, s) for s in cfg.seeds for q in cfg.q for p in cfg.p for meth in cfg.methods]
    if "salsa" in cfg.methods:  # no dependence on p
        cells = [c for c in cells if c[0] != "salsa" or c[2] == cfg.p[0]]
    datasets = {s: None for s in cfg.seeds}

    def work(cell):
        meth, q, p, s = cell
        path = _cell_file(out, *cell)
        if path.exists():
            saved = json.loads(path.read_text())
            if saved.get("digest") == digest and "row" in saved:
                r = saved["row"]
                return CellResult(**{k: r[k] for k in CSV_HEADER}, trace=saved.get("trace", {}), error=saved.get("error"))
        res = run_cell(cfg, meth, q, p, s, datasets[s])
        row = {k: getattr(res, k) for k in CSV_HEADER}
        payload = {"digest": digest, "row": row, "trace": res.trace, "error": res.error}
        path.write_text(json.dumps(payload, default=_json_default, allow_nan=True))
        return res

    # datasets first so threads never race on generation
    for s in cfg.seeds:
        try:
            datasets[s] = load_data(cfg, s)
        except Exception:
            log.exception("could not load data for seed %s", s)
    n = resolve_threads(threads)
    if n == 1:
        rows = [work(c) for c in cells]
    else:
        with ThreadPoolExecutor(max_workers=n) as pool:
            rows = list(pool.map(work, cells))
    table = ResultTable(rows)
    table.write_csv(out / "results.csv")
    return table


def _json_default(o):
    if isinstance(o, np.integer):
        return int(o)
    if isinstance(o, np.floating):
        return float(o)
    if isinstance(o, np.ndarray):
        return o.tolist()
    raise TypeError(type(o).__name__)


# --------------------------------------------------------------------------
# timing


@dataclass
class TimingRow:
    m: int
    N: int
    method: str
    median_s: float
    repeats: list[float]


def _time_solver(fn, repeats: int) -> list[float]:
    out = []
    for _ in range(repeats):
        t0 = time.perf_counter()
        fn()
        out.append(time.perf_counter() - t0)
    return out


def _warm_up() -> None:
    ds = synthetic.make_dataset("f2", 10, 2, 0)
    dm = design(sparse_bank(2, 1, 20, make_rng(0, _BANK, 1)), ds.X_train)
    imp_run(dm, ds.y_train, None, None, 0.5)
    logging.disable(logging.WARNING)
    try:
        baselines.bpdn_solve(baselines.BpdnProblem(dm.A, ds.y_train, 0.0), max_iter=50)
    finally:
        logging.disable(logging.NOTSET)


def time_comparison(ms, Ns, *, function: str = "fs", d: int = 5, q: int = 1, p: float = 0.2, seed: int = 0,
                    repeats: int = 3, methods=("shrimp", "srfe_s"), bpdn_max_iter: int = 5000) -> list[TimingRow]:
    """Median wall time of the solver loops per (m, N); data and designs are built outside the timer.

    ``N`` counts weight rows, so the design has 2N columns.
    """
    rows = []
    _warm_up()
    for m in ms:
        ds = synthetic.make_dataset(function, m, d, seed)
        for N in Ns:
            bank = sparse_bank(d, q, N, make_rng(seed, _BANK, q), 1.0 / q)
            dm = design(bank, ds.X_train)
            y = ds.y_train
            fns = {
                "shrimp": lambda: imp_run(dm, y, None, None, p),
                "srfe_s": lambda: baselines.bpdn_solve(baselines.BpdnProblem(dm.A, y, 0.0), max_iter=bpdn_max_iter),
            }
            for meth in methods:
                times = _time_solver(fns[meth], repeats)
                rows.append(TimingRow(m, N, meth, statistics.median(times), times))
    return rows


def write_timing_csv(rows, path) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["m", "N", "method", "median_s", "repeats"])
        for r in rows:
            w.writerow([r.m, r.N, r.method, repr(r.median_s), ";".join(repr(t) for t in r.repeats)])
