import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from mnarmc.metrics import EstimatorReport, mse, rank_energy_curve, run_estimator, seed_summary
from mnarmc.obsmodel import Quadratic, simulate


def test_mse_examples():
    M = np.random.default_rng(0).uniform(-0.5, 0.5, (4, 5))
    assert mse(M, M) == 0.0
    assert mse(M + 0.1, M) == pytest.approx(0.01)
    assert mse(np.ones((3, 3)), -np.ones((3, 3))) == 4.0
    with pytest.raises(ValueError):
        mse(np.zeros((2, 2)), np.zeros((2, 3)))


@settings(max_examples=50, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_mse_symmetric_and_definite(seed):
    rng = np.random.default_rng(seed)
    A, B = rng.uniform(-1, 1, (2, 6, 4))
    assert mse(A, B) == mse(B, A) > 0


def test_energy_curve_examples():
    u, v = np.arange(1.0, 6.0), np.arange(1.0, 4.0)
    np.testing.assert_allclose(rank_energy_curve(np.outer(u, v)), [1.0, 1.0, 1.0])
    np.testing.assert_allclose(rank_energy_curve(np.diag([3.0, 1.0])), [0.9, 1.0])
    np.testing.assert_allclose(rank_energy_curve(np.eye(10)), np.arange(1, 11) / 10, atol=1e-12)
    with pytest.raises(ValueError):
        rank_energy_curve(np.zeros((3, 3)))


@settings(max_examples=30, deadline=None)
@given(st.integers(1, 15), st.integers(1, 15), st.integers(0, 2**32 - 1))
def test_energy_curve_monotone(m, n, seed):
    c = rank_energy_curve(np.random.default_rng(seed).uniform(-1, 1, (m, n)))
    assert (np.diff(c) >= -1e-15).all()
    assert abs(c[-1] - 1.0) <= 1e-12


def test_true_example1_energy():
    M, _, _ = simulate(100, 7, Quadratic(), "none", 0)
    assert rank_energy_curve(M)[6] >= 0.999


def test_report_and_runner():
    M, _, obs = simulate(40, 3, Quadratic(), "none", 0)
    rep = run_estimator("usvt", obs, M)
    d = rep.to_dict()
    assert d["method"] == "usvt" and 0 <= d["mse"] <= 4 and d["params"]["eta"] == 0.02
    rep = run_estimator("candes_recht", obs)
    d = rep.to_dict()
    assert "mse" not in d and d["diagnostics"]["converged"]
    with pytest.raises(ValueError):
        run_estimator("svd", obs)
    with pytest.raises(ValueError):
        EstimatorReport(estimate=M, method="usvt", wall_time_seconds=0.0, mse=5.0)


def test_seed_summary():
    s = seed_summary([3.0, 1.0, 2.0])
    assert s == {"n": 3, "median": 2.0, "mean": 2.0, "min": 1.0, "max": 3.0}


def test_energy_curve_monotone_under_rounding():
    # many tiny trailing singular values used to make the forced final 1.0 dip below the cumsum
    from mnarmc.usvt import modified_usvt

    _, _, obs = simulate(100, 7, Quadratic(), "none", 1)
    curve = rank_energy_curve(modified_usvt(obs))
    assert (np.diff(curve) >= 0).all()
    assert curve[-1] == 1.0
