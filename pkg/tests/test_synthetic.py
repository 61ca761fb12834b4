import math

import numpy as np
import pytest

from shrimp import synthetic
from shrimp.errors import ParameterError
from shrimp.synthetic import REGISTRY, Dataset, evaluate, make_dataset, read_csv, write_csv


def test_f3_at_ones():
    assert evaluate("f3", np.ones((1, 10)))[0] == 1.0


def test_f6_at_origin():
    assert evaluate("f6", np.zeros((1, 3)))[0] == 0.0


def test_f2_exact_trig():
    x = np.array([[math.pi / 3, math.pi / 6, 0.0]])
    assert evaluate("f2", x)[0] == pytest.approx(1.0, abs=1e-15)


def test_too_few_columns():
    with pytest.raises(ParameterError):
        evaluate("f7", np.zeros((2, 3)))


def test_unknown_function():
    with pytest.raises(ParameterError):
        synthetic.get("nope")


def test_order_registry():
    assert [REGISTRY[f"f{i}"].q_star for i in range(1, 8)] == [1, 1, 2, 2, 3, 2, 2]
    assert REGISTRY["ishigami"] is REGISTRY["f6"]
    assert REGISTRY["fh1"].order(7) == 7


def _sinc(t):
    return 1.0 if t == 0 else math.sin(math.pi * t) / (math.pi * t)


# scalar re-implementation, one sample at a time
_REFERENCE = {
    "f1": lambda x: sum(x[:-1]) + math.exp(-x[-1]),
    "f2": lambda x: math.cos(x[0]) + math.sin(x[1]),
    "f3": lambda x: (2 * x[0] - 1) * (2 * x[1] - 1),
    "f4": lambda x: (2 * x[0] - 1) * (2 * x[1] - 1) + (2 * x[0] - 1) * (2 * x[2] - 1) + (2 * x[1] - 1) * (2 * x[2] - 1),
    "f5": lambda x: _sinc(x[0]) * _sinc(x[2]) ** 3 + _sinc(x[1]),
    "f6": lambda x: math.sin(x[0]) + 7 * math.sin(x[1]) ** 2 + 0.1 * x[2] ** 4 * math.sin(x[0]),
    "f7": lambda x: math.cos(x[0]) * x[2] + x[1] ** 2 * x[3] + sum(x[2:]),
    "fa1": lambda x: math.cos(x[0]) * x[2] + x[1] ** 2 * x[3] + sum(x[2:]),
    "fs": lambda x: 3 * math.cos(x[2]) + 4 * math.sin(x[3]) + 2 * math.sin(x[1]),
    "fa2": lambda x: math.cos(x[0] + x[1]) + 5 * math.cos(2 * x[2] + 10 * x[3]),
    "fa3": lambda x: math.sin(9 * x[0]) + 10 * math.cos(10 * x[1]),
    "fh1": lambda x: math.sin(sum(x)),
    "fh2": lambda x: math.cos(math.prod(x)),
    "fh3": lambda x: (1 + math.sqrt(sum(v * v for v in x))) ** -0.5,
    "fk": lambda x: x[3] ** 2 + x[1] * x[2] + x[0] * x[1] + x[3],
}


@pytest.mark.parametrize("fid", sorted(_REFERENCE))
def test_against_scalar_reference(fid):
    f = REGISTRY[fid]
    X = np.random.default_rng(0).uniform(-f.box, f.box, (100, 10))
    ref = np.array([_REFERENCE[fid](list(row)) for row in X])
    assert np.allclose(evaluate(f, X), ref, rtol=1e-14, atol=1e-14)


def test_noiseless_dataset_is_exact():
    ds = make_dataset("f4", 50, 5, 1)
    assert np.array_equal(ds.y_train, evaluate("f4", ds.X_train))
    assert np.array_equal(ds.y_test, evaluate("f4", ds.X_test))
    assert len(ds.y_train) == 45 and len(ds.y_val) == 5 and len(ds.y_test) == 50


def test_ishigami_box():
    ds = make_dataset("f6", 200, 3, 0)
    assert np.abs(ds.X_train).max() <= math.pi and np.abs(ds.X_train).max() > 1


def test_dataset_determinism():
    a, b = make_dataset("f7", 40, 6, 9, noise=0.1), make_dataset("f7", 40, 6, 9, noise=0.1)
    for k in ("X_train", "y_train", "X_val", "y_val", "X_test", "y_test"):
        assert np.array_equal(getattr(a, k), getattr(b, k))


def test_splits_disjoint():
    ds = make_dataset("f2", 100, 3, 2)
    rows = {tuple(r) for r in ds.X_train}
    assert not rows & {tuple(r) for r in ds.X_val}


def test_make_dataset_rejects_small_m():
    with pytest.raises(ParameterError):
        make_dataset("f2", 5, 3, 0)


def test_csv_roundtrip(tmp_path):
    ds = make_dataset("f5", 30, 4, 0)
    ds.save(tmp_path)
    assert (tmp_path / "train.csv").read_text().splitlines()[0] == "x0,x1,x2,x3,y"
    back = Dataset.load(tmp_path)
    assert np.array_equal(back.X_train, ds.X_train) and np.array_equal(back.y_test, ds.y_test)
