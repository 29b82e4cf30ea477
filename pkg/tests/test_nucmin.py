import numpy as np
import pytest

from mnarmc.linalg import nuclear_norm
from mnarmc.nucmin import SolverParams, certify_solution, modified_candes_recht, project_feasible
from mnarmc.obsmodel import Identity, ObservedMatrix, Quadratic, simulate


@pytest.fixture(scope="module")
def example1():
    M, _, obs = simulate(100, 7, Quadratic(), "none", 0)
    est, diag = modified_candes_recht(obs)
    return M, obs, est, diag


def small_obs(seed=0):
    rng = np.random.default_rng(seed)
    M = np.clip(rng.uniform(-1, 1, (30, 2)) @ rng.uniform(-1, 1, (2, 25)), -1, 1)
    mask = rng.random(M.shape) < 0.6
    return M, ObservedMatrix(M, mask)


def test_project_feasible_examples():
    obs = ObservedMatrix(np.array([[-0.5, 0.0], [0.3, 0.0]]), np.array([[True, False], [True, False]]))
    A = np.array([[-0.5, 0.9], [0.3, -1.0]])
    np.testing.assert_array_equal(project_feasible(A, obs), A)
    B = np.array([[0.2, 3.7], [0.3, -4.0]])
    np.testing.assert_array_equal(project_feasible(B, obs), [[-0.5, 1.0], [0.3, -1.0]])
    with pytest.raises(ValueError):
        project_feasible(np.zeros((3, 3)), obs)


def test_project_is_euclidean_projection():
    M, obs = small_obs()
    rng = np.random.default_rng(1)
    A = 2 * rng.standard_normal(M.shape)
    P = project_feasible(A, obs)
    for _ in range(50):
        Z = project_feasible(3 * rng.standard_normal(M.shape), obs)
        # obtuse-angle characterization of projections onto convex sets
        assert np.sum((A - P) * (Z - P)) <= 1e-12


def test_fully_revealed_returns_observed():
    M, _ = small_obs()
    obs = ObservedMatrix(M, np.ones_like(M, dtype=bool))
    est, diag = modified_candes_recht(obs)
    np.testing.assert_array_equal(est, M)


def test_empty_mask_rejected():
    obs = ObservedMatrix(np.zeros((4, 4)), np.zeros((4, 4), dtype=bool))
    with pytest.raises(ValueError):
        modified_candes_recht(obs)


def test_params_validation():
    for kw in ({"rho": 0}, {"tol": -1}, {"max_iters": 0}, {"over_relaxation": 2.0}):
        with pytest.raises(ValueError):
            SolverParams(**kw)


def test_nonconvergence_flagged():
    M, obs = small_obs()
    est, diag = modified_candes_recht(obs, SolverParams(max_iters=3))
    assert not diag.converged and diag.iterations == 3
    np.testing.assert_array_equal(est[obs.mask], obs.values[obs.mask])
    assert np.abs(est).max() <= 1


def test_example1_exact_recovery(example1):
    M, obs, est, diag = example1
    assert diag.converged
    assert max(diag.primal_residual, diag.dual_residual) <= 1e-6 * (1 + np.linalg.norm(obs.values))
    assert np.mean((est - M) ** 2) < 1e-9
    np.testing.assert_array_equal(est[obs.mask], obs.values[obs.mask])
    assert np.abs(est).max() <= 1


def test_certificate(example1):
    M, obs, est, diag = example1
    rep = certify_solution(est, obs, M)
    assert rep["violation"] == 0.0
    assert rep["gap"] <= 1e-4 * nuclear_norm(M)
    assert rep["nuclear_norm"] == pytest.approx(diag.final_nuclear_norm)


def test_certificate_trivial_and_violation():
    M, obs = small_obs()
    rep = certify_solution(M, obs, M)
    assert rep["gap"] == 0.0 and rep["violation"] == 0.0
    bad = M.copy()
    i, j = np.argwhere(obs.mask)[0]
    bad[i, j] += 0.1
    assert certify_solution(bad, obs, M)["violation"] == pytest.approx(0.1)


@pytest.mark.parametrize("seed", range(3))
def test_optimality_against_truth(seed):
    M, obs = small_obs(seed)
    est, diag = modified_candes_recht(obs)
    assert diag.converged
    assert nuclear_norm(est) <= nuclear_norm(M) + 1e-3


@pytest.mark.parametrize("seed", range(3))
def test_residuals_decrease_over_decades(seed):
    M, obs = small_obs(seed)
    _, diag = modified_candes_recht(obs, SolverParams(tol=1e-12, max_iters=1000))
    hist = {it: max(r, s) for it, r, s in diag.history}
    for k in (1, 10, 100):
        if 10 * k in hist:
            assert hist[10 * k] <= hist[k]


def test_deterministic():
    M, obs = small_obs()
    a, da = modified_candes_recht(obs)
    b, db = modified_candes_recht(obs)
    np.testing.assert_array_equal(a, b)
    assert da.iterations == db.iterations


def test_noisy_example_worse_than_usvt():
    from mnarmc.usvt import modified_usvt

    M, X, obs = simulate(100, 2, Identity(), "bernoulli", 0)
    est, _ = modified_candes_recht(obs)
    assert np.mean((est - M) ** 2) > np.mean((modified_usvt(obs) - M) ** 2)
