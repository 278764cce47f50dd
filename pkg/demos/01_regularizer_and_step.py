"""
The regularizer, its conjugate, and one boosting step
=====================================================

"""

import numpy as np

from convex_coding import RegParams, conjugate, conjugate_subgradient, phi, solve_alpha

rng = np.random.default_rng(0)

# The regularizer mixes a squared L2,1 norm (row sparsity) with a squared
# L1 norm (entry sparsity); gamma sets the mix.
W = rng.standard_normal((3, 5)) * (rng.random((3, 5)) < 0.4)
for gamma in (0.1, 1.0, 10.0):
    print(f"phi(W, gamma={gamma:>4}) = {phi(W, gamma):.4f}")

# Its conjugate is a one-dimensional search over a clamp level alpha.
Z = rng.standard_normal((4, 6))
sol = solve_alpha(Z, 1.0)
print(f"\nalpha_hat = {sol.alpha_hat:.6f}, conjugate = {sol.conjugate_value:.6f}, "
      f"max row = {sol.max_row_index}")

# A subgradient of the conjugate is the new basis-times-weights block that a
# boosting step adds. Fenchel-Young equality certifies it.
dW = conjugate_subgradient(Z, 1.0)
gap = np.sum(dW * Z) - phi(dW, 1.0) - conjugate(Z, 1.0)
print(f"nonzero rows: {np.flatnonzero(np.any(dW, axis=1)).tolist()}, FY gap = {gap:.2e}")

# Tiny gamma keeps the whole largest row; huge gamma keeps one entry.
print("\ngamma=1e-8 step:\n", np.round(conjugate_subgradient(Z, 1e-8), 3))
print("gamma=1e8 nonzeros:", np.argwhere(conjugate_subgradient(Z, 1e8) != 0).tolist(),
      "argmax |Z|:", np.unravel_index(np.argmax(np.abs(Z)), Z.shape))

params = RegParams(lam=0.1, gamma=1.0)
print("\nparameters:", params)
