import warnings

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from conftest import lasso_grid, synthetic_instance
from convex_coding.regularizer import RegParams, phi
from convex_coding.solvers import (CodingResult, SolverOptions, alternating_optimization,
                                   baseline_objective, boosted_coding, lasso_column,
                                   lasso_columns, objective, optimize_weights)


# --- objective -------------------------------------------------------------

def test_objective_examples():
    X = np.array([[0.6], [0.8]])
    assert objective(np.eye(2), np.zeros((2, 1)), X, RegParams(1.0, 1.0)) == pytest.approx(0.5)
    x, lam, gamma = 1.7, 0.3, 2.0
    got = objective([[1.0]], [[x]], [[x]], RegParams(lam, gamma))
    assert got == pytest.approx(lam * (1 + gamma) * x * x / 2)
    assert objective(np.eye(2), np.zeros((2, 3)), np.zeros((2, 3)), RegParams(1.0, 1.0)) == 0.0


def test_objective_dimension_mismatch():
    with pytest.raises(ValueError, match="dimension mismatch"):
        objective(np.eye(2), np.zeros((3, 1)), np.zeros((2, 1)), RegParams(1.0, 1.0))


# --- optimize_weights ------------------------------------------------------

def test_optimize_weights_zero_fixed_point():
    W = optimize_weights(np.eye(2), np.zeros((2, 3)), RegParams(1.0, 1.0), np.zeros((2, 3)))
    np.testing.assert_array_equal(W, 0)


def test_optimize_weights_scalar_closed_form():
    # minimize 0.5 (w - 1)^2 + lam (1 + gamma) w^2 / 2  ->  w = 1 / (1 + lam (1 + gamma))
    W = optimize_weights([[1.0]], [[1.0]], RegParams(0.1, 1.0), [[0.0]])
    assert W[0, 0] == pytest.approx(1.0 / 1.2, abs=1e-3)


def test_optimize_weights_matches_grid():
    B, X, params = np.eye(2), np.array([[1.0], [0.0]]), RegParams(0.5, 1.0)
    g = np.arange(-2.0, 2.0 + 5e-4, 1e-3)
    w1, w2 = np.meshgrid(g, g, indexing="ij")
    s = np.abs(w1) + np.abs(w2)
    vals = 0.5 * ((w1 - 1) ** 2 + w2 ** 2) + params.lam * (0.5 * s ** 2 + 0.5 * params.gamma * s ** 2)
    W = optimize_weights(B, X, params, np.zeros((2, 1)))
    assert objective(B, W, X, params) <= vals.min() + 5e-3


def test_optimize_weights_never_worse_than_start():
    rng = np.random.default_rng(4)
    B = rng.standard_normal((6, 3))
    B /= np.linalg.norm(B, axis=0)
    X = rng.standard_normal((6, 10))
    params = RegParams(0.2, 0.5)
    for W0 in (np.zeros((3, 10)), rng.standard_normal((3, 10))):
        W = optimize_weights(B, X, params, W0, SolverOptions(w_max_iters=50))
        assert objective(B, W, X, params) <= objective(B, W0, X, params) + 1e-12


def test_optimize_weights_rejects_mismatch():
    with pytest.raises(ValueError):
        optimize_weights(np.eye(2), np.zeros((3, 1)), RegParams(1.0, 1.0), np.zeros((2, 1)))


@pytest.mark.parametrize("seed", range(5))
def test_regularization_path_monotone(seed):
    rng = np.random.default_rng(seed)
    B = rng.standard_normal((4, 2))
    B /= np.linalg.norm(B, axis=0)
    X = rng.standard_normal((4, 3))
    opts = SolverOptions(w_max_iters=20000, w_tol=1e-12, w_step0=0.5)
    prev = None
    for lam in (0.01, 0.1, 1.0):
        W = optimize_weights(B, X, RegParams(lam, 1.0), None, opts)
        p = phi(W, 1.0)
        if prev is not None:
            assert p <= prev + 1e-6
        prev = p


# --- boosted coding --------------------------------------------------------

def test_boosted_zero_data():
    res = boosted_coding(np.zeros((3, 4)), RegParams(1.0, 1.0))
    assert res.basis.shape == (3, 0) and res.weights.shape == (0, 4)
    assert res.objective_trace == [] and res.stopped_early


def test_boosted_rank_one():
    rng = np.random.default_rng(0)
    u = rng.standard_normal(8)
    u /= np.linalg.norm(u)
    X = np.outer(u, rng.standard_normal(30))
    res = boosted_coding(X, RegParams(1e-3, 1.0), "heuristic", SolverOptions(max_basis=1))
    assert abs(abs(res.basis[:, 0] @ u) - 1.0) < 1e-9
    R = res.basis @ res.weights - X
    assert np.linalg.norm(R) <= 0.05 * np.linalg.norm(X)


def test_boosted_huge_lambda_stops_immediately():
    X, _, _ = synthetic_instance(seed=1, n=40)
    res = boosted_coding(X, RegParams(1e6, 1.0), "heuristic", SolverOptions(max_basis=5))
    assert res.stopped_early and res.n_basis == 0 and res.steps_taken == 1


@pytest.mark.parametrize("oracle", ["l1", "l21", "heuristic", "exemplar"])
def test_boosted_invariants(oracle):
    X, _, _ = synthetic_instance(seed=2, m=8, n=40, k=3)
    opts = SolverOptions(max_basis=5, w_max_iters=500)
    res = boosted_coding(X, RegParams(1e-3, 1.0), oracle, opts)
    again = boosted_coding(X, RegParams(1e-3, 1.0), oracle, opts)
    assert res.n_basis >= 1
    np.testing.assert_allclose(np.linalg.norm(res.basis, axis=0), 1.0, atol=1e-9)
    trace = np.array(res.objective_trace)
    start = 0.5 * np.sum(X * X)
    assert trace[0] <= start + 1e-9
    assert np.all(np.diff(trace) <= 1e-9)
    assert res.basis.tobytes() == again.basis.tobytes()
    assert res.weights.tobytes() == again.weights.tobytes()
    assert len(res.provenance) == res.n_basis


def test_boosted_unknown_oracle():
    with pytest.raises(ValueError):
        boosted_coding(np.ones((2, 2)), RegParams(1.0, 1.0), "magic")


# --- lasso -----------------------------------------------------------------

def test_lasso_examples():
    assert lasso_column([[1.0]], [2.0], 0.5)[0] == pytest.approx(1.5)
    np.testing.assert_allclose(lasso_column(np.eye(2), [1.0, -3.0], 1.0), [0.0, -2.0])
    rng = np.random.default_rng(0)
    B = rng.standard_normal((5, 3))
    B /= np.linalg.norm(B, axis=0)
    x = rng.standard_normal(5)
    lam = np.max(np.abs(B.T @ x))
    np.testing.assert_array_equal(lasso_column(B, x, lam), 0)


@pytest.mark.parametrize("seed", range(50))
def test_lasso_matches_grid(seed):
    rng = np.random.default_rng(seed)
    k = 1 + seed % 2
    B = rng.standard_normal((3, k))
    B /= np.linalg.norm(B, axis=0)
    x = rng.standard_normal(3)
    lam = float(rng.uniform(0.01, 1.0))
    w = lasso_column(B, x, lam)
    val = 0.5 * np.sum((B @ w - x) ** 2) + lam * np.sum(np.abs(w))
    assert abs(val - lasso_grid(B, x, lam)) <= 5e-3


def test_lasso_columns_matches_single():
    rng = np.random.default_rng(1)
    B = rng.standard_normal((6, 4))
    B /= np.linalg.norm(B, axis=0)
    X = rng.standard_normal((6, 5))
    W = lasso_columns(B, X, 0.3)
    for j in range(5):
        np.testing.assert_allclose(W[:, j], lasso_column(B, X[:, j], 0.3), atol=1e-7)


# --- alternating optimization ---------------------------------------------

def test_alternating_zero_data():
    res = alternating_optimization(np.zeros((4, 6)), 2, 0.1, SolverOptions(alt_iters=3))
    np.testing.assert_array_equal(res.weights, 0)
    assert res.objective_trace == [0.0] * 4


def test_alternating_same_seed_identical():
    X, _, _ = synthetic_instance(seed=3, m=6, n=30, k=3)
    opts = SolverOptions(seed=7, alt_iters=5)
    a = alternating_optimization(X, 3, 0.01, opts)
    b = alternating_optimization(X, 3, 0.01, opts)
    assert a.basis.tobytes() == b.basis.tobytes()
    assert a.weights.tobytes() == b.weights.tobytes()
    assert a.objective_trace == b.objective_trace


def test_alternating_unit_columns_and_trace():
    X, _, _ = synthetic_instance(seed=4, m=8, n=60, k=4)
    res = alternating_optimization(X, 4, 0.01, SolverOptions(seed=1))
    np.testing.assert_allclose(np.linalg.norm(res.basis, axis=0), 1.0, atol=1e-9)
    assert len(res.objective_trace) == SolverOptions().alt_iters + 1
    assert np.all(np.diff(res.objective_trace) <= 1e-9)
    assert res.objective_trace[-1] == pytest.approx(
        baseline_objective(res.basis, res.weights, X, 0.01))


def test_alternating_recovers_identity_basis():
    rng = np.random.default_rng(11)
    W = rng.standard_normal((2, 8)) * (rng.random((2, 8)) < 0.6)
    W[:, :2] = np.eye(2) * 2.0  # every atom in use
    X = np.eye(2) @ W
    ok = 0
    for seed in range(20):
        res = alternating_optimization(X, 2, 1e-3, SolverOptions(seed=seed))
        ok += np.linalg.norm(res.basis @ res.weights - X) <= 0.05 * np.linalg.norm(X)
    assert ok >= 18


def test_alternating_warns_on_degenerate_size():
    with warnings.catch_warnings(record=True) as w:
        warnings.simplefilter("always")
        alternating_optimization(np.ones((1, 2)), 2, 0.1, SolverOptions(alt_iters=1))
    assert any("basis size" in str(x.message) for x in w)


@settings(max_examples=20, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_coding_result_shapes(seed):
    X, _, _ = synthetic_instance(seed=seed, m=5, n=12, k=2)
    res = alternating_optimization(X, 3, 0.05, SolverOptions(seed=seed % 1000, alt_iters=2))
    assert isinstance(res, CodingResult)
    assert res.basis.shape == (5, 3) and res.weights.shape == (3, 12)
