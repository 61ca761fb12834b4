import itertools
import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from shrimp.errors import DataError, ParameterError, RegimeError
from shrimp.features import COS, SIN, design, restrict, sparse_bank
from shrimp.diagnostics import (
    coherence,
    coherence_threshold,
    complex_gram_extremes,
    kernel_entry_check,
    prop1_bounds,
    spectrum_through_pruning,
    support_report,
    theorem1_components,
    verify_prop1,
)
from shrimp.imp import ImpTrace, PrunedModel, imp_run
from shrimp.sampling import make_rng
from shrimp.synthetic import make_dataset


def test_prop1_printed_example():
    b = prop1_bounds(1, 1, 2, 10, 20)
    assert b.lam1_lower == pytest.approx(2 - 0.475 + 19 * 90 / 400 * 5**-0.5)
    assert round(b.lam1_lower, 4) == 3.4368
    c = 2.0
    assert b.lamm_upper == pytest.approx((c - 1) / c + 0.1 + ((c - 1) / c * 10 + 1) * 5**-0.5)


def test_prop1_limits():
    m, N = 10, 20
    for b in (prop1_bounds(1e12, 1e12, 2, m, N), prop1_bounds(1, 1, 4000, m, N)):
        assert b.lam1_lower == pytest.approx(2 - (N - 1) * m / N**2)
        assert b.lamm_upper == pytest.approx(0.5 + 1 / m)


def test_prop1_regime_and_inputs():
    with pytest.raises(RegimeError):
        prop1_bounds(1, 1, 2, 30, 20)
    with pytest.raises(ParameterError):
        prop1_bounds(0, 1, 2, 10, 20)


@settings(max_examples=50, deadline=None)
@given(g=st.floats(0.01, 10), s1=st.floats(0.01, 10), s2=st.floats(0.01, 10), q=st.integers(1, 8), m=st.integers(1, 30), extra=st.integers(0, 30))
def test_prop1_monotone_in_decay(g, s1, s2, q, m, extra):
    N = m + extra
    a, b = prop1_bounds(g, min(s1, s2), q, m, N), prop1_bounds(g, max(s1, s2), q, m, N)
    assert a.decay >= b.decay
    assert a.lam1_lower >= b.lam1_lower - 1e-12 and a.lamm_upper >= b.lamm_upper - 1e-12


def test_complex_gram_embedding_matches_complex_eigs():
    rng = np.random.default_rng(0)
    Z = rng.normal(size=(5, 9))
    hi, lo = complex_gram_extremes(np.cos(Z), np.sin(Z))
    A = np.exp(1j * Z)
    ev = np.linalg.eigvalsh(A @ A.conj().T / 9)
    assert hi == pytest.approx(ev[-1]) and lo == pytest.approx(ev[0], abs=1e-12)


def test_verify_prop1_example():
    rep = verify_prop1(1, 1, 2, 10, 20, 200, make_rng(0))
    assert rep.passed
    with pytest.raises(ParameterError):
        verify_prop1(1, 1, 2, 10, 20, 10, make_rng(0))


def test_ill_conditioning_at_full_order():
    rep = verify_prop1(1, 1, 20, 20, 24, 60, make_rng(1))
    assert rep.lamm_mean < 0.1 and rep.lam1_mean >= 1.5


def test_kernel_entry_check():
    mean, se, target = kernel_entry_check([0.5, -0.3], 1.0, 20000, make_rng(2))
    assert abs(mean - target) <= 3 * se


def test_coherence_cases():
    assert coherence(np.eye(4)) == 0.0
    a = np.array([1.0, 2.0, 3.0])
    assert coherence(np.column_stack([a, a, [1, 0, 0]])) == pytest.approx(1.0)
    with pytest.raises(DataError):
        coherence(np.column_stack([a, np.zeros(3)]))


def test_coherence_vs_pair_oracle():
    A = np.random.default_rng(5).choice([-1.0, 1.0], size=(4, 8))
    B = A / np.linalg.norm(A, axis=0)
    oracle = max(abs(B[:, i] @ B[:, j]) for i, j in itertools.combinations(range(8), 2))
    assert coherence(A, block=3) == oracle


def test_coherence_of_subset_not_larger():
    bank = sparse_bank(4, 2, 30, make_rng(0))
    dm = design(bank, make_rng(1).uniform(-1, 1, (12, 4)))
    sub = restrict(dm, dm.columns[::3])
    assert coherence(sub) <= coherence(dm) + 1e-15


def test_theorem1_components():
    t = theorem1_components(np.eye(5), 1)
    assert t.lam_max_over_m == pytest.approx(0.2)
    assert coherence_threshold(1) == pytest.approx(0.6247, abs=1e-4)
    assert coherence_threshold(3) == pytest.approx(0.1249, abs=1e-4)
    with pytest.raises(ParameterError):
        coherence_threshold(0)


def _fake_trace(dm, P_list):
    mods = [PrunedModel(np.array(P), np.ones(len(P)), 0, 0, t) for t, P in enumerate(P_list)]
    return ImpTrace(mods, 0, 0.5)


def test_spectrum_orthogonal_rows():
    bank = sparse_bank(1, 1, 2, make_rng(0))
    dm = design(bank, np.zeros((1, 1)))  # single row [1, 1, 0, 0]
    sp = spectrum_through_pruning(_fake_trace(dm, [[0, 1], [0]]), dm)
    assert sp.lam_max[0] == pytest.approx(1.0) and sp.lam_min[0] == pytest.approx(1.0)
    assert sp.lam_max[1] == pytest.approx(1.0)  # single column, ||a||^2 / 1


def test_spectrum_raw_lambda_nonincreasing():
    ds = make_dataset("f7", 60, 6, 0)
    dm = design(sparse_bank(6, 2, 200, make_rng(0)), ds.X_train)
    tr = imp_run(dm, ds.y_train, ds.X_val, ds.y_val, 0.3)
    sp = spectrum_through_pruning(tr, dm)
    assert np.all(np.diff(sp.lam_max_raw) <= 1e-10)
    assert np.all(sp.lam_max >= sp.lam_min) and np.all(sp.lam_min >= -1e-10)


def test_support_report_single_cos():
    bank = sparse_bank(5, 1, 5, make_rng(0))
    j = int(np.flatnonzero(bank.supports[:, 0] == 3)[0])
    rep = support_report(PrunedModel(np.array([j]), np.array([2.0]), 0, 0, 0), bank)
    assert rep.recovered == {3} and rep.sin_mass.sum() == 0 and rep.cos_mass[3] == 2.0
    assert rep.dominant_parity() == {3: "cos"}


def test_support_report_empty_and_tau():
    bank = sparse_bank(3, 1, 3, make_rng(0))
    rep = support_report(PrunedModel(np.array([], int), np.array([]), 0, 0, 0), bank)
    assert rep.recovered == frozenset()
    with pytest.raises(ParameterError):
        support_report(PrunedModel(np.array([], int), np.array([]), 0, 0, 0), bank, tau=1.5)


def test_report_csvs(tmp_path):
    bank = sparse_bank(3, 1, 3, make_rng(0))
    rep = support_report(PrunedModel(np.array([0, 4]), np.array([1.0, -2.0]), 0, 0, 0), bank)
    rep.to_csv(tmp_path / "s.csv")
    assert (tmp_path / "s.csv").read_text().splitlines()[0] == "coordinate,cos_mass,sin_mass,recovered"
    assert COS == 0 and SIN == 1
