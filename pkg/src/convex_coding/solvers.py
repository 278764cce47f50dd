"""Boosted coding and the alternating-optimization baseline."""

from dataclasses import dataclass, field, replace
import warnings

import numpy as np

from .linalg import as_matrix, as_vector
from .oracles import OracleConfig, heuristic_search, oracle_exemplar, oracle_l1, oracle_l21
from .regularizer import RegParams, phi

ORACLES = ("l1", "l21", "heuristic", "exemplar")


@dataclass(frozen=True)
class SolverOptions:
    """Knobs shared by both coding algorithms.

    ``w_step0=None`` means ``1 / ||X||_F`` for the data being coded.
    """

    max_basis: int = 64
    w_max_iters: int = 2000
    w_tol: float = 1e-8
    w_step0: float | None = None
    alt_iters: int = 20
    seed: int = 0
    zero_row_tol: float = 1e-6

    def __post_init__(self):
        for name in ("max_basis", "w_max_iters", "w_tol", "alt_iters", "zero_row_tol"):
            if not getattr(self, name) > 0:
                raise ValueError(f"{name} must be positive")
        if self.w_step0 is not None and not self.w_step0 > 0:
            raise ValueError("w_step0 must be positive")
        if not self.w_tol < 1:
            raise ValueError("w_tol must be below 1")
        if self.seed < 0:
            raise ValueError("seed must be nonnegative")


@dataclass
class CodingResult:
    basis: np.ndarray
    weights: np.ndarray
    objective_trace: list = field(default_factory=list)
    steps_taken: int = 0
    stopped_early: bool = False
    provenance: list = field(default_factory=list)

    @property
    def n_basis(self):
        return self.basis.shape[1]


def _conform(B, W, X):
    if B.shape[0] != X.shape[0] or B.shape[1] != W.shape[0] or W.shape[1] != X.shape[1]:
        raise ValueError(
            f"dimension mismatch: B {B.shape}, W {W.shape}, X {X.shape}")


def objective(B, W, X, params):
    """``0.5 * ||B W - X||_F^2 + lam * phi(W)``."""
    B, W, X = as_matrix(B, "B"), as_matrix(W, "W"), as_matrix(X, "X")
    if W.shape[0] == 0 and B.shape[1] == 0:
        return 0.5 * float(np.sum(X * X))
    _conform(B, W, X)
    R = B @ W - X
    return 0.5 * float(np.sum(R * R)) + params.lam * phi(W, params.gamma)


def _reg_subgradient(W, gamma):
    row_norms = np.linalg.norm(W, axis=1)
    G = np.zeros_like(W)
    nz = row_norms > 0
    G[nz] = W[nz] / row_norms[nz, None]
    return row_norms.sum() * G + gamma * np.abs(W).sum() * np.sign(W)


def optimize_weights(B, X, params, W0=None, opts=None):
    """Subgradient descent on the coding objective for a fixed basis.

    Step ``t`` (from 1) has length ``w_step0 / sqrt(t)``. Rows or entries
    at a kink of the regularizer contribute a zero subgradient. The best
    iterate seen is returned, so the result is never worse than ``W0``.
    Stops when the best objective improved by a relative amount below
    ``w_tol`` over the last 10 iterations, or after ``w_max_iters``.
    """
    opts = opts or SolverOptions()
    B, X = as_matrix(B, "B"), as_matrix(X, "X")
    k = B.shape[1]
    W0 = np.zeros((k, X.shape[1])) if W0 is None else as_matrix(W0, "W0")
    _conform(B, W0, X)
    if k == 0:
        return W0.copy()

    xx = float(np.sum(X * X))
    step0 = opts.w_step0
    if step0 is None:
        step0 = 1.0 / np.sqrt(xx) if xx > 0 else 1.0
    G = B.T @ B
    C = B.T @ X
    lam, gamma = params.lam, params.gamma

    def value(W):
        GW = G @ W
        loss = 0.5 * (float(np.sum(W * GW)) - 2.0 * float(np.sum(W * C)) + xx)
        return loss + lam * phi(W, gamma), GW

    W = W0.copy()
    f, GW = value(W)
    best_W, best_f = W.copy(), f
    history = [best_f]
    for t in range(1, opts.w_max_iters + 1):
        sub = GW - C + lam * _reg_subgradient(W, gamma)
        if not np.any(sub):
            break
        W = W - (step0 / np.sqrt(t)) * sub
        f, GW = value(W)
        if f < best_f:
            best_W, best_f = W.copy(), f
        history.append(best_f)
        if len(history) > 10:
            old = history[-11]
            if old - best_f <= opts.w_tol * max(abs(old), 1e-300):
                break

    # the Gram-form objective can disagree with the direct one in the last bits
    if objective(B, best_W, X, params) > objective(B, W0, X, params):
        return W0.copy()
    return best_W


def boosted_coding(X, params, oracle="heuristic", opts=None, oracle_cfg=None,
                   candidates=None):
    """Grow a basis one oracle-proposed column at a time.

    Each step appends the oracle's unit vector with a zero weight row,
    re-optimizes all weights from the previous solution, and stops once
    the new row ends up (numerically) unused.

    Parameters
    ----------
    X : array_like, shape (m, n)
    params : RegParams
    oracle : {"l1", "l21", "heuristic", "exemplar"}
    opts : SolverOptions, optional
    oracle_cfg : OracleConfig, optional
    candidates : array_like, shape (m, K), optional
        Unit-norm candidate columns for the exemplar oracle; defaults to
        the normalized nonzero columns of ``X``.

    Returns
    -------
    CodingResult
    """
    if oracle not in ORACLES:
        raise ValueError(f"unknown oracle {oracle!r}; expected one of {ORACLES}")
    opts = opts or SolverOptions()
    cfg = oracle_cfg or OracleConfig()
    X = as_matrix(X, "X")
    m, n = X.shape
    B = np.zeros((m, 0))
    W = np.zeros((0, n))
    result = CodingResult(B, W)
    if not np.any(X):
        result.stopped_early = True
        return result

    if oracle == "exemplar":
        if candidates is None:
            norms = np.linalg.norm(X, axis=0)
            keep = norms > 0
            candidates = X[:, keep] / norms[keep]
        candidates = as_matrix(candidates, "candidates")

    if opts.w_step0 is None:
        opts = replace(opts, w_step0=1.0 / float(np.linalg.norm(X)))

    for _ in range(opts.max_basis):
        E = B @ W - X
        if not np.any(E):
            result.stopped_early = True
            break
        if oracle == "l1":
            b, source = oracle_l1(E), "l1"
        elif oracle == "l21":
            b, source = oracle_l21(E, cfg), "l21"
        elif oracle == "exemplar":
            b, source = oracle_exemplar(E, candidates, params.lam, params.gamma), "exemplar"
        else:
            b, source = heuristic_search(E, params.lam, params.gamma, cfg)

        B_new = np.column_stack([B, b])
        W_new = optimize_weights(B_new, X, params, np.vstack([W, np.zeros((1, n))]), opts)
        result.steps_taken += 1
        if np.linalg.norm(W_new[-1]) <= opts.zero_row_tol:
            result.stopped_early = True
            break
        B, W = B_new, W_new
        result.provenance.append(source)
        result.objective_trace.append(objective(B, W, X, params))

    result.basis, result.weights = B, W
    return result


def soft_threshold(a, t):
    return np.sign(a) * np.maximum(np.abs(a) - t, 0.0)


def lasso_columns(B, X, lam, W0=None, tol=1e-8, max_sweeps=1000):
    """Cyclic coordinate descent for every column of ``X`` at once.

    Each column is an independent problem
    ``0.5 * ||B w - x||^2 + lam * ||w||_1``; the sweep is vectorized
    across columns and stops when no coordinate of any column moved more
    than ``tol``.
    """
    B, X = as_matrix(B, "B"), as_matrix(X, "X")
    if B.shape[0] != X.shape[0]:
        raise ValueError(f"dimension mismatch: B {B.shape}, X {X.shape}")
    k = B.shape[1]
    W = np.zeros((k, X.shape[1])) if W0 is None else as_matrix(W0, "W0").copy()
    if W.shape != (k, X.shape[1]):
        raise ValueError(f"W0 has shape {W.shape}, expected {(k, X.shape[1])}")
    G = B.T @ B
    C = B.T @ X
    diag = np.diag(G)
    for _ in range(max_sweeps):
        biggest = 0.0
        for i in range(k):
            if diag[i] == 0.0:
                continue
            old = W[i].copy()
            r = C[i] - G[i] @ W + diag[i] * old
            W[i] = soft_threshold(r, lam) / diag[i]
            delta = np.max(np.abs(W[i] - old)) if W.shape[1] else 0.0
            biggest = max(biggest, delta)
        if biggest < tol:
            break
    return W


def lasso_column(B, x, lam, tol=1e-8, max_sweeps=1000):
    """Single-column L1-regularized least squares; see :func:`lasso_columns`."""
    x = as_vector(x, "x")
    return lasso_columns(B, x[:, None], lam, tol=tol, max_sweeps=max_sweeps)[:, 0]


def baseline_objective(B, W, X, lam):
    """``0.5 * ||B W - X||_F^2 + lam * ||W||_1``, the lasso-scaled form."""
    R = B @ W - X
    return 0.5 * float(np.sum(R * R)) + lam * float(np.sum(np.abs(W)))


def _unit_columns(B, rng):
    norms = np.linalg.norm(B, axis=0)
    for j in np.flatnonzero(norms < 1e-10):
        while True:
            col = rng.standard_normal(B.shape[0])
            nc = np.linalg.norm(col)
            if nc >= 1e-10:
                break
        B[:, j] = col
        norms[j] = nc
    return B / norms


def alternating_optimization(X, d, lam, opts=None):
    """L1 sparse coding by alternating lasso W-steps and least-squares B-steps.

    The basis starts as ``d`` seeded Gaussian columns. Each alternation
    solves the lasso for every column, then refits ``B`` by least squares
    and rescales its columns to unit length (a projection heuristic, not
    an exact constrained step). A closing W-step makes the returned pair
    consistent, so the trace has ``alt_iters + 1`` entries, one per
    W-step.
    """
    opts = opts or SolverOptions()
    X = as_matrix(X, "X")
    m, n = X.shape
    if d < 1:
        raise ValueError("d must be at least 1")
    if d >= m * n:
        warnings.warn(f"basis size {d} is not smaller than the data size {m * n}")
    rng = np.random.default_rng(opts.seed)
    B = _unit_columns(rng.standard_normal((m, d)), rng)
    W = np.zeros((d, n))
    result = CodingResult(B, W)
    for it in range(opts.alt_iters + 1):
        W = lasso_columns(B, X, lam, W0=W)
        result.objective_trace.append(baseline_objective(B, W, X, lam))
        result.steps_taken += 1
        if it == opts.alt_iters:
            break
        WWt = W @ W.T + 1e-10 * np.eye(d)
        B = np.linalg.solve(WWt, W @ X.T).T
        B = _unit_columns(B, rng)
    result.basis, result.weights = B, W
    result.provenance = ["random"] * d
    return result
