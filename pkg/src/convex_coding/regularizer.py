r"""Block norms, the squared L21 + L1 regularizer and its Fenchel conjugate.

The regularizer on a weight matrix ``W`` (rows = basis vectors, columns =
examples) is

.. math::
   \Phi(W) = \tfrac12 \|W\|_{2,1}^2 + \tfrac{\gamma}{2} \|W\|_1^2

and its conjugate is evaluated as a one-dimensional minimization over the
clamp level ``alpha`` of the infimal convolution

.. math::
   \Phi^*(Z) = \min_{\alpha \ge 0} \frac{\alpha^2}{2\gamma}
       + \tfrac12 \max_i \sum_j \big((|Z_{ij}| - \alpha)_+\big)^2 .
"""

from dataclasses import dataclass
import math

import numpy as np

from .linalg import as_matrix


@dataclass(frozen=True)
class RegParams:
    """Overall weight ``lam`` and the L1-squared share ``gamma``."""

    lam: float
    gamma: float

    def __post_init__(self):
        for name in ("lam", "gamma"):
            v = getattr(self, name)
            if not (math.isfinite(v) and v > 0):
                raise ValueError(f"{name} must be positive and finite, got {v!r}")


@dataclass(frozen=True)
class AlphaSolution:
    alpha_hat: float
    conjugate_value: float
    max_row_index: int
    kappa: float


def _norm_order(p):
    if p in (1, 2):
        return p
    if p == np.inf or p == math.inf or p == "inf":
        return np.inf
    raise ValueError(f"norm order must be 1, 2 or inf, got {p!r}")


def block_norm(M, p, q):
    """L_q norm of the per-row L_p norms of ``M``."""
    M = as_matrix(M, "M")
    p, q = _norm_order(p), _norm_order(q)
    row_norms = np.linalg.norm(M, ord=p, axis=1)
    return float(np.linalg.norm(row_norms, ord=q))


def phi(W, gamma):
    """Regularizer value without the overall weight ``lam``.

    ``gamma`` may be a float or a :class:`RegParams`.
    """
    if isinstance(gamma, RegParams):
        gamma = gamma.gamma
    W = as_matrix(W, "W")
    l21 = float(np.sum(np.linalg.norm(W, axis=1)))
    l1 = float(np.sum(np.abs(W)))
    return 0.5 * l21 * l21 + 0.5 * gamma * l1 * l1


def infimal_A(Z, alpha):
    """Minimizing ``A`` of the infimal convolution at a fixed clamp level."""
    if alpha < 0:
        raise ValueError("alpha must be nonnegative")
    Z = as_matrix(Z, "Z")
    return np.clip(Z, -alpha, alpha)


def infimal_objective(Z, A, gamma):
    """``0.5 * ||Z - A||_{2,inf}^2 + ||A||_inf^2 / (2 gamma)``."""
    Z = as_matrix(Z, "Z")
    A = as_matrix(A, "A")
    r = block_norm(Z - A, 2, np.inf)
    a = float(np.max(np.abs(A))) if A.size else 0.0
    return 0.5 * r * r + a * a / (2.0 * gamma)


def _row_halfsq(absZ, alpha):
    excess = np.maximum(absZ - alpha, 0.0)
    return 0.5 * np.sum(excess * excess, axis=1)


def _g(absZ, alpha, gamma):
    return alpha * alpha / (2.0 * gamma) + float(np.max(_row_halfsq(absZ, alpha)))


def _default_tol(zmax):
    return 1e-10 * max(1.0, zmax)


def _right_slope(absZ, alpha, gamma):
    # right derivative of g: the dominating row decides
    excess = np.maximum(absZ - alpha, 0.0)
    h = np.sum(excess * excess, axis=1)
    m = int(np.argmax(h))
    return alpha / gamma - float(np.sum(excess[m]))


def solve_alpha(Z, gamma, tol=None):
    """Solve the clamp-level search behind the conjugate.

    The objective is convex in ``alpha`` (a max of convex quadratics plus
    a convex term), so bisection on the sign of its right derivative over
    ``[0, max|Z|]`` brackets the minimizer to any tolerance.

    Parameters
    ----------
    Z : array_like, shape (r, c)
    gamma : float
    tol : float, optional
        Absolute tolerance on ``alpha``. Defaults to
        ``1e-10 * max(1, max|Z|)``.

    Returns
    -------
    AlphaSolution
    """
    Z = as_matrix(Z, "Z")
    if not gamma > 0:
        raise ValueError("gamma must be positive")
    absZ = np.abs(Z)
    zmax = float(absZ.max()) if absZ.size else 0.0
    if zmax == 0.0:
        return AlphaSolution(0.0, 0.0, 0, 0.0)
    if tol is None:
        tol = _default_tol(zmax)
    if not tol > 0:
        raise ValueError("tol must be positive")

    lo, hi = 0.0, zmax
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if mid <= lo or mid >= hi:
            break
        if _right_slope(absZ, mid, gamma) < 0.0:
            lo = mid
        else:
            hi = mid

    value, alpha = min((_g(absZ, lo, gamma), lo), (_g(absZ, hi, gamma), hi))
    h = _row_halfsq(absZ, alpha)
    m = int(np.argmax(h))
    return AlphaSolution(float(alpha), float(value), m, float(2.0 * h[m]))


def conjugate(Z, gamma, tol=None):
    """Value of the regularizer conjugate at ``Z``."""
    return solve_alpha(Z, gamma, tol).conjugate_value


def _shrunk_row(z, alpha):
    return np.sign(z) * np.maximum(np.abs(z) - alpha, 0.0)


def conjugate_subgradient(Z, gamma, tol=None):
    """A subgradient of the conjugate at ``Z``; the boosting step.

    Normally a single row is nonzero: the row ``m`` that attains the max
    at the optimal clamp level, with entries ``Z - sign(Z) * alpha`` where
    ``|Z| > alpha``. When the optimal level sits where two rows cross
    (neither row alone is stationary there), the two shrunk rows are
    mixed with the weights that make the combination stationary, which
    is what keeps the Fenchel-Young equality exact.
    """
    Z = as_matrix(Z, "Z")
    sol = solve_alpha(Z, gamma, tol)
    dW = np.zeros_like(Z)
    if sol.conjugate_value == 0.0:
        return dW

    alpha = sol.alpha_hat
    absZ = np.abs(Z)
    zmax = float(absZ.max())
    atol = _default_tol(zmax) if tol is None else tol
    excess = np.maximum(absZ - alpha, 0.0)
    h = 0.5 * np.sum(excess * excess, axis=1)
    slope = alpha / gamma - np.sum(excess, axis=1)
    m = sol.max_row_index

    # slack an alpha error of size atol can cause in row values and slopes;
    # rows with no excess contribute nothing and are never candidates
    value_tol = 4.0 * atol * Z.shape[1] * (zmax - alpha + atol)
    slope_tol = 4.0 * atol * (1.0 / gamma + Z.shape[1])
    active = np.flatnonzero((h > 0.0) & (h >= h[m] - value_tol))
    stationary = [i for i in active if abs(slope[i]) <= slope_tol]
    neg = [i for i in active if slope[i] < -slope_tol]
    pos = [i for i in active if slope[i] > slope_tol]
    if stationary or not (neg and pos):
        i = m if m in stationary or not stationary else stationary[0]
        dW[i] = _shrunk_row(Z[i], alpha)
        return dW

    i = max(neg, key=lambda r: (h[r], -r))
    k = max(pos, key=lambda r: (h[r], -r))
    theta = slope[k] / (slope[k] - slope[i])
    dW[i] = theta * _shrunk_row(Z[i], alpha)
    dW[k] = (1.0 - theta) * _shrunk_row(Z[k], alpha)
    return dW
