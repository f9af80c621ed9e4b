"""Deformed-chart information geometry on weighted grids.

Modules:
  grid         tensor grids, finite differences, quadrature
  measure      subexponential reference measures
  deformed     deformed exponential/logarithm families
  sobolev      weighted mixed-norm spaces and graded inner products
  manifold     chart points, normalization, tangent representations
  geometry     divergences and information tensors
  filtering    dense and projected nonlinear filters
  diagnostics  bump-series counterexample, embedding trends
  verify       per-module invariant suites
  cli          command-line entry point
"""

from ._backend import BACKEND
from .deformed import DeformedExp, log_deformed, make_family, psi, psi_deriv
from .diagnostics import CounterexampleConfig, dahlberg_terms, nu_embedding_trend
from .geometry import (amari_chentsov, chi2_mo, cosine_defect, duality_pairing,
                       eguchi_check, fisher_rao, jeffreys, kl)
from .grid import GridFunction, TensorGrid, apply_fd, build_grid, diff, integrate_mu, lp_norm
from .manifold import ManifoldPoint, TangentRep, normalize
from .measure import ReferenceMeasure, make_reference
from .sobolev import MixedNormSpec, hk_inner, mixed_norm, multi_indices, smoothness_order
from .filtering import (kalman_bucy, make_basis, make_model, project_hk,
                        run_dense_filter, run_projection_filter, run_trial,
                        run_trials, simulate_sde)

__version__ = "0.1.0"

__all__ = [
    "BACKEND", "CounterexampleConfig", "DeformedExp", "GridFunction",
    "ManifoldPoint", "MixedNormSpec", "ReferenceMeasure", "TangentRep",
    "TensorGrid", "amari_chentsov", "apply_fd", "build_grid", "chi2_mo",
    "cosine_defect", "dahlberg_terms", "diff", "duality_pairing",
    "eguchi_check", "fisher_rao", "hk_inner", "integrate_mu", "jeffreys",
    "kalman_bucy", "kl", "log_deformed", "lp_norm", "make_basis",
    "make_family", "make_model", "make_reference", "mixed_norm",
    "multi_indices", "normalize", "nu_embedding_trend", "project_hk",
    "psi", "psi_deriv", "run_dense_filter", "run_projection_filter",
    "run_trial", "run_trials", "simulate_sde", "smoothness_order",
    "__version__",
]
