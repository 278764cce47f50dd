"""Basis-vector oracles for boosted coding.

Every oracle takes the reconstruction error ``E = B @ W - X`` and returns a
unit-norm vector to append to the basis. The dual variable for a
candidate ``b`` is ``z = -(b @ E) / lam``; the conjugate only depends on
``|z|`` so the sign convention never changes a ranking.
"""

from dataclasses import dataclass

import numpy as np

from .linalg import as_matrix, as_vector, power_iteration
from .regularizer import solve_alpha


@dataclass(frozen=True)
class OracleConfig:
    n_candidates: int = 10
    step_size: float = 0.1
    ascent_tol: float = 1e-6
    max_ascent_iters: int = 200
    power_tol: float = 1e-10
    power_max_iter: int = 1000

    def __post_init__(self):
        for name in ("n_candidates", "step_size", "ascent_tol",
                     "max_ascent_iters", "power_tol", "power_max_iter"):
            if not getattr(self, name) > 0:
                raise ValueError(f"{name} must be positive")


def oracle_l1(E):
    """Normalized column of ``E`` with the largest L2 norm."""
    E = as_matrix(E, "E")
    norms = np.linalg.norm(E, axis=0)
    j = int(np.argmax(norms))
    if norms.size == 0 or norms[j] == 0.0:
        raise ValueError("no residual to fit")
    return E[:, j] / norms[j]


def oracle_l21(E, cfg=None):
    """Dominant eigenvector of ``E @ E.T``."""
    cfg = cfg or OracleConfig()
    v, _ = power_iteration(E, cfg.power_tol, cfg.power_max_iter)
    return v


def _dual_row(b, E, lam):
    return -(b @ E)[None, :] / lam


def _check_unit(b, atol=1e-9):
    if abs(np.linalg.norm(b) - 1.0) > atol:
        raise ValueError("basis candidate must have unit L2 norm")


def oracle_objective(b, E, lam, gamma, tol=None):
    """Conjugate value of the dual row produced by candidate ``b``."""
    b = as_vector(b, "b")
    _check_unit(b)
    E = as_matrix(E, "E")
    return solve_alpha(_dual_row(b, E, lam), gamma, tol).conjugate_value


def _objectives(C, E, lam, gamma, tol):
    Z = -(C.T @ E) / lam
    return np.array([solve_alpha(Z[i:i + 1], gamma, tol).conjugate_value
                     for i in range(Z.shape[0])])


def oracle_exemplar(E, candidates, lam, gamma, tol=None):
    """Best of a finite set of unit-norm candidate columns."""
    E = as_matrix(E, "E")
    C = as_matrix(candidates, "candidates")
    if C.shape[1] == 0:
        raise ValueError("empty candidate set")
    if C.shape[0] != E.shape[0]:
        raise ValueError("candidates and E must have the same number of rows")
    if np.any(np.abs(np.linalg.norm(C, axis=0) - 1.0) > 1e-6):
        raise ValueError("candidate columns must have unit L2 norm")
    scores = _objectives(C, E, lam, gamma, tol)
    return C[:, int(np.argmax(scores))].copy()


def candidate_matrix(E, cfg):
    """Eigenvector followed by the top-N columns of ``E``, normalized."""
    norms = np.linalg.norm(E, axis=0)
    n = min(cfg.n_candidates, int(np.count_nonzero(norms)))
    # stable sort so equal norms keep index order
    top = np.argsort(-norms, kind="stable")[:n]
    cols = [oracle_l21(E, cfg)]
    cols.extend(E[:, j] / norms[j] for j in top)
    return np.column_stack(cols)


def ascent_gradient(b, E, lam, gamma, tol=None):
    """Gradient of the candidate objective with respect to ``b``.

    Returns ``(grad, value)``.
    """
    z = _dual_row(b, E, lam)
    sol = solve_alpha(z, gamma, tol)
    z = z[0]
    shrunk = np.sign(z) * np.maximum(np.abs(z) - sol.alpha_hat, 0.0)
    return -(E @ shrunk) / lam, sol.conjugate_value


def oracle_heuristic(E, lam, gamma, cfg=None, tol=None):
    """Candidate selection followed by projected gradient ascent.

    The candidates are the eigenvector solution and the largest columns
    of ``E``; the best one seeds a fixed-step ascent on the unit sphere.
    The best iterate seen is returned, so the result never scores below
    the seed.
    """
    return heuristic_search(E, lam, gamma, cfg, tol)[0]


def heuristic_search(E, lam, gamma, cfg=None, tol=None):
    """:func:`oracle_heuristic` plus a short description of where ``b`` came from."""
    cfg = cfg or OracleConfig()
    E = as_matrix(E, "E")
    C = candidate_matrix(E, cfg)
    scores = _objectives(C, E, lam, gamma, tol)
    k = int(np.argmax(scores))
    seed = "eigen" if k == 0 else "column"
    b = C[:, k].copy()
    best_b, best_val, improved = b, scores[k], False

    for _ in range(cfg.max_ascent_iters):
        grad, val = ascent_gradient(b, E, lam, gamma, tol)
        if val > best_val:
            best_b, best_val, improved = b, val, True
        # the radial part of the gradient only rescales b
        tangent = grad - (grad @ b) * b
        if np.linalg.norm(tangent) < cfg.ascent_tol:
            break
        nb = b + cfg.step_size * grad
        nrm = np.linalg.norm(nb)
        if nrm == 0.0:
            break
        nb = nb / nrm
        step = np.linalg.norm(nb - b)
        b = nb
        if step < cfg.ascent_tol:
            break
    val = solve_alpha(_dual_row(b, E, lam), gamma, tol).conjugate_value
    if val > best_val:
        best_b, best_val, improved = b, val, True
    return best_b, (f"heuristic:{seed}+ascent" if improved else f"heuristic:{seed}")
