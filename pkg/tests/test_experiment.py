import csv
import json
import math
import xml.etree.ElementTree as ET

import numpy as np
import pytest

from shrimp.cli import main
from shrimp.errors import DataError, ParameterError
from shrimp.experiment import CSV_HEADER, ExperimentConfig, ResultTable, ingest_csv, run_experiment, time_comparison
from shrimp.plots import emit_plots, mse_plot, spans_decades


def _cfg(tmp_path, **kw):
    base = dict(function="f2", m=40, d=3, q=[1], p=[30.0], N=60, seeds=[0], methods=["shrimp"], out=str(tmp_path / "run"))
    base.update(kw)
    return ExperimentConfig(**base)


def test_config_validation():
    with pytest.raises(ParameterError):
        ExperimentConfig(p=[0.0])
    with pytest.raises(ParameterError):
        ExperimentConfig(q=[])
    with pytest.raises(ParameterError):
        ExperimentConfig(methods=["lasso"])
    with pytest.raises(ParameterError):
        ExperimentConfig(sigma2=-2)
    with pytest.raises(ParameterError):
        ExperimentConfig.from_dict({"bogus": 1})


def test_overrides():
    cfg = ExperimentConfig().with_overrides(["N=500", "q=[1,2]", "function=f6", "sigma2=100"])
    assert cfg.N == 500 and cfg.q == [1, 2] and cfg.function == "f6" and cfg.sigma2_for(2) == 100.0
    assert ExperimentConfig().sigma2_for(4) == 0.25
    with pytest.raises(ParameterError):
        ExperimentConfig().with_overrides(["N"])


def test_single_cell_run(tmp_path):
    table = run_experiment(_cfg(tmp_path))
    assert len(table.rows) == 1
    with open(tmp_path / "run" / "results.csv") as fh:
        rows = list(csv.reader(fh))
    assert tuple(rows[0]) == CSV_HEADER and len(rows) == 2


def test_row_reproducible_from_trace(tmp_path):
    table = run_experiment(_cfg(tmp_path))
    doc = json.loads(next((tmp_path / "run" / "traces").glob("*.json")).read_text())
    t = doc["trace"]["winner"]["t_star"]
    assert doc["trace"]["steps"][t]["test_mse"] == table.rows[0].test_mse


def test_seeds_only_change_seed_dependent_values(tmp_path):
    rows = run_experiment(_cfg(tmp_path, seeds=[0, 1])).rows
    a, b = sorted(rows, key=lambda r: r.seed)
    assert (a.function, a.method, a.q, a.p) == (b.function, b.method, b.q, b.p)
    assert a.seed == 0 and b.seed == 1 and a.test_mse != b.test_mse


def test_idempotent_rerun(tmp_path):
    cfg = _cfg(tmp_path, methods=["shrimp", "naive_prune"])
    first = (tmp_path / "run" / "results.csv")
    run_experiment(cfg)
    before = first.read_text()
    traces = {p.name: p.read_text() for p in (tmp_path / "run" / "traces").glob("*.json")}
    table = run_experiment(cfg, threads=2)
    assert first.read_text().splitlines()[1:] == before.splitlines()[1:]
    assert {p.name: p.read_text() for p in (tmp_path / "run" / "traces").glob("*.json")} == traces
    assert len(table.rows) == 2


def test_threads_deterministic(tmp_path, monkeypatch):
    monkeypatch.setenv("SHRIMP_THREADS", "3")
    cfg = _cfg(tmp_path, methods=["shrimp", "random_prune", "min_l2"], seeds=[0, 1])
    par = run_experiment(cfg)
    ser = run_experiment(_cfg(tmp_path, methods=["shrimp", "random_prune", "min_l2"], seeds=[0, 1], out=str(tmp_path / "s")), threads=1)
    key = lambda r: (r.method, r.seed)
    assert [(r.test_mse, r.n_winner) for r in sorted(par.rows, key=key)] == [(r.test_mse, r.n_winner) for r in sorted(ser.rows, key=key)]


def test_failed_cell_is_recorded(tmp_path):
    cfg = _cfg(tmp_path, q=[1, 5])  # q=5 > d=3
    table = run_experiment(cfg)
    bad = table.select(q=5)[0]
    assert bad.n_winner == -1 and math.isnan(bad.test_mse) and "ParameterError" in bad.error
    assert table.select(q=1)[0].n_winner > 0


def test_all_methods_run(tmp_path):
    cfg = _cfg(tmp_path, methods=["shrimp", "min_l2", "random_prune", "naive_prune", "srfe_s", "salsa"], bpdn_max_iter=200)
    table = run_experiment(cfg)
    assert {r.method for r in table.rows} == set(cfg.methods)
    assert all(r.error is None for r in table.rows)
    back = ResultTable.read_csv(tmp_path / "run" / "results.csv")
    assert len(back.rows) == 6 and back.summary()


def _write(path, text):
    path.write_text(text)
    return path


def test_ingest_toy(tmp_path):
    p = _write(tmp_path / "t.csv", "a,b,y\n1,2,3\n4,5,6\n7,8,9\n")
    ds = ingest_csv(p, "y", standardize=False)
    n = len(ds.y_train) + len(ds.y_val)
    assert n == 3 and ds.X_train.shape[1] == 2


def test_ingest_standardizes_with_train_stats(tmp_path):
    rng = np.random.default_rng(0)
    data = rng.normal(3, 2, (200, 4))
    lines = ["a,b,c,y"] + [",".join(repr(float(v)) for v in row) for row in data]
    ds = ingest_csv(_write(tmp_path / "d.csv", "\n".join(lines)), "y")
    assert np.abs(ds.X_train.mean(axis=0)).max() <= 1e-12
    assert np.abs(ds.X_train.var(axis=0) - 1).max() <= 1e-12
    assert np.abs(ds.X_val.mean(axis=0)).max() > 1e-6  # val uses train statistics


def test_ingest_nan_row_dropped(tmp_path, caplog):
    p = _write(tmp_path / "n.csv", "a,y\n1,2\nnan,3\n4,5\n6,7\n8,9\n")
    with caplog.at_level("WARNING"):
        ds = ingest_csv(p)
    assert len(ds.y_train) + len(ds.y_val) == 4 and "dropped 1" in caplog.text


def test_ingest_parse_error_has_line(tmp_path):
    p = _write(tmp_path / "e.csv", "a,y\n1,2\nfoo,3\n")
    with pytest.raises(DataError, match=":3:"):
        ingest_csv(p)
    with pytest.raises(DataError):
        ingest_csv(tmp_path / "missing.csv")


def test_csv_mode_experiment(tmp_path):
    rng = np.random.default_rng(1)
    X = rng.uniform(-1, 1, (80, 3))
    y = np.cos(X[:, 0]) + X[:, 1]
    lines = ["a,b,c,y"] + [",".join(repr(float(v)) for v in [*r, t]) for r, t in zip(X, y)]
    p = _write(tmp_path / "real.csv", "\n".join(lines))
    table = run_experiment(_cfg(tmp_path, mode="csv", data_path=str(p), target="y"))
    assert table.rows[0].function == "real" and table.rows[0].error is None


def test_timing_smoke():
    import time

    t0 = time.perf_counter()
    rows = time_comparison([10], [20], function="f2", d=2, repeats=1)
    assert {r.method for r in rows} == {"shrimp", "srfe_s"}
    assert time.perf_counter() - t0 < 1.0


def test_plots(tmp_path):
    run_experiment(_cfg(tmp_path, methods=["shrimp", "random_prune"]))
    out = emit_plots(tmp_path / "run")
    assert len(out) == 1
    root = ET.parse(out[0]).getroot()
    gids = [el.get("id") for el in root.iter() if (el.get("id") or "").startswith("trace-")]
    assert sorted(gids) == ["trace-0", "trace-1"]


def test_plot_skips_missing_trace(tmp_path, caplog):
    run_experiment(_cfg(tmp_path))
    trace = next((tmp_path / "run" / "traces").glob("*.json"))
    with caplog.at_level("WARNING"):
        n = mse_plot([trace, tmp_path / "gone.json"], tmp_path / "x.svg")
    assert n == 1 and "skipping" in caplog.text
    ET.parse(tmp_path / "x.svg")


def test_log_axis_rule():
    assert spans_decades([1e-5, 1e-1]) and not spans_decades([1e-2, 1])


def test_cli_run_and_ingest(tmp_path, capsys):
    rc = main(["run", "--set", "function=f2", "--set", "m=40", "--set", "d=3", "--set", "q=[1]",
               "--set", "N=60", "--seed", "2", "--out", str(tmp_path / "c")])
    assert rc == 0 and (tmp_path / "c" / "results.csv").exists()
    assert "selected q" in capsys.readouterr().out
    p = _write(tmp_path / "t.csv", "a,y\n1,2\n3,4\n5,6\n")
    assert main(["ingest-check", str(p)]) == 0
    assert main(["ingest-check", str(tmp_path / "nope.csv")]) == 2
    assert main(["plot", str(tmp_path / "c")]) == 0


def test_cli_config_file(tmp_path):
    cfg = tmp_path / "c.json"
    cfg.write_text(json.dumps({"function": "f3", "m": 40, "d": 3, "q": [2], "N": 60, "seeds": [0], "out": str(tmp_path / "o")}))
    assert main(["run", "--config", str(cfg), "--threads", "2"]) == 0
