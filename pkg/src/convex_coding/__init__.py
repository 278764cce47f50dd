"""Convex sparse coding by boosting with Fenchel-conjugate steps."""

from .linalg import power_iteration
from .regularizer import (AlphaSolution, RegParams, block_norm, conjugate,
                          conjugate_subgradient, infimal_A, phi, solve_alpha)
from .oracles import (OracleConfig, candidate_matrix, oracle_exemplar, oracle_heuristic, oracle_l1,
                      oracle_l21, oracle_objective)
from .solvers import (CodingResult, SolverOptions, alternating_optimization,
                      boosted_coding, lasso_column, lasso_columns, objective,
                      optimize_weights)
from .denoise import (DenoiseReport, PatchGrid, add_noise, basis_tiles, denoise_image,
                      extract_patches, psnr, read_pgm, reconstruct, refit_support,
                      write_pgm)

__version__ = "0.1.0"
