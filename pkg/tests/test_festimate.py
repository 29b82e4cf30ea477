import numpy as np
import pytest
from scipy.integrate import quad

from mnarmc.festimate import PiecewiseConstantFn, estimate_f, evaluate_piecewise, integrated_sq_error
from mnarmc.obsmodel import Constant, Quadratic, simulate

# From tests/oracles/ise_oracle.py --n 500 --b 25 --reps 40 (2 x max over replicates).
ORACLE_ISE_N500_B25 = 2.35e-4


def step():
    return PiecewiseConstantFn(np.array([-1.0, 0.0, 1.0]), np.array([0.0, 1.0]))


def test_grid_construction():
    b = 4
    f = estimate_f(np.ones((3, 3), bool), np.zeros((3, 3)), b, seed=9)
    centers = -1 + (np.arange(1, 2 * b + 4) - 2) / b
    assert f.breakpoints.size == 2 * b + 3 and f.n_intervals == 2 * b + 2
    assert np.abs(f.breakpoints - centers).max() <= 1 / (4 * b)
    assert centers[0] == pytest.approx(-1 - 1 / b) and centers[-1] == pytest.approx(1 + 1 / b)


def test_all_and_none_revealed():
    M_hat = np.random.default_rng(0).uniform(-1, 1, (20, 20))
    f = estimate_f(np.ones((20, 20), bool), M_hat, 5, 0)
    counts = np.bincount(f.bin_index(M_hat.ravel()), minlength=f.n_intervals)
    np.testing.assert_array_equal(f.values[counts > 0], 1.0)
    np.testing.assert_array_equal(f.values[counts == 0], 0.0)
    assert (estimate_f(np.zeros((20, 20), bool), M_hat, 5, 0).values == 0).all()


@pytest.mark.parametrize("seed", range(5))
def test_hand_enumeration(seed):
    M_hat = np.array([[-0.5, -0.5], [0.5, 0.5]])
    mask = np.array([[True, False], [True, True]])
    f = estimate_f(mask, M_hat, 1, seed)
    assert evaluate_piecewise(f, -0.5) == 0.5
    assert evaluate_piecewise(f, 0.5) == 1.0


def test_breakpoint_spacing():
    for b in (1, 3, 25, 70):
        for seed in range(5):
            a = estimate_f(np.ones((2, 2), bool), np.zeros((2, 2)), b, seed).breakpoints
            assert np.diff(a).min() >= 1 / (2 * b)


def test_evaluate_boundaries():
    f = step()
    assert evaluate_piecewise(f, 0.0) == 1.0
    assert evaluate_piecewise(f, -1e-9) == 0.0
    assert evaluate_piecewise(f, 1.0) == 1.0
    assert evaluate_piecewise(f, -1.0) == 0.0
    const = PiecewiseConstantFn(np.array([-1.2, 1.1]), np.array([0.3]))
    assert evaluate_piecewise(const, 0.77) == 0.3
    with pytest.raises(ValueError):
        evaluate_piecewise(f, 1.5)


def test_piecewise_validation():
    with pytest.raises(ValueError):
        PiecewiseConstantFn(np.array([-1.0, 0.0, 0.0, 1.0]), np.zeros(3))
    with pytest.raises(ValueError):
        PiecewiseConstantFn(np.array([-0.5, 1.0]), np.zeros(1))
    with pytest.raises(ValueError):
        PiecewiseConstantFn(np.array([-1.0, 1.0]), np.array([1.5]))
    with pytest.raises(ValueError):
        PiecewiseConstantFn(np.array([-1.0, 1.0]), np.zeros(2))


def test_ise_examples():
    M = np.random.default_rng(1).uniform(-1, 1, (30, 30))
    f = step()
    assert integrated_sq_error(f, f, M) == 0.0
    half = PiecewiseConstantFn(np.array([-1.0, 1.0]), np.array([0.5]))
    assert integrated_sq_error(half, Constant(0.3), M) == pytest.approx(0.04)
    with pytest.raises(ValueError):
        integrated_sq_error(half, Constant(0.3), M + 2)


def test_ise_zero_estimate_matches_quadrature():
    expected = quad(lambda x: (0.5 * x * x + 0.3) ** 2, -1, 1)[0] / 2
    assert expected == pytest.approx(0.24)
    M = np.random.default_rng(2).uniform(-1, 1, (1000, 1000))
    zero = PiecewiseConstantFn(np.array([-1.0, 1.0]), np.array([0.0]))
    ise = integrated_sq_error(zero, Quadratic(), M)
    # sd of (0.5x^2+0.3)^2 under Uniform[-1,1] is below 0.2
    assert abs(ise - expected) <= 4 * 0.2 / 1000


def test_oracle_plugin_threshold_and_scaling():
    f = Quadratic()
    ise = {}
    for n in (100, 500):
        vals = []
        for seed in range(3):
            M, _, obs = simulate(n, 7, f, "none", seed)
            vals.append(integrated_sq_error(estimate_f(obs.mask, M, 25, seed), f, M))
        ise[n] = np.median(vals)
    assert ise[500] < ORACLE_ISE_N500_B25
    assert ise[500] < ise[100]
