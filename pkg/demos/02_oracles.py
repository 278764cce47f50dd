"""
Choosing the next basis vector
==============================

Each oracle proposes a unit vector b for the current residual E. Larger
conjugate values of the dual row -(1/lam) b^T E mean a larger guaranteed
drop in the objective.
"""

import numpy as np

from convex_coding import (OracleConfig, candidate_matrix, oracle_exemplar, oracle_heuristic,
                           oracle_l1, oracle_l21, oracle_objective)

rng = np.random.default_rng(1)
E = rng.standard_normal((6, 40))
lam = 0.5

for gamma in (0.1, 1.0, 10.0):
    picks = {
        "l1 (max-norm column)": oracle_l1(E),
        "l21 (top eigenvector)": oracle_l21(E),
        "exemplar (data columns)": oracle_exemplar(E, candidate_matrix(E, OracleConfig()), lam, gamma),
        "heuristic (seed + ascent)": oracle_heuristic(E, lam, gamma),
    }
    print(f"gamma = {gamma}")
    for name, b in picks.items():
        print(f"  {name:<27} {oracle_objective(b, E, lam, gamma):10.4f}")

# As gamma grows the eigenvector falls behind and a single data column wins;
# the heuristic starts from the best of both and only improves on it.
