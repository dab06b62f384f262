"""Diffusion-based (D-iteration) solvers for finite-difference fixed-point systems."""

from ._kernels import BACKEND
from .baselines import BaselineConfig, direct_solve, gauss_seidel, jacobi, tridiagonal_solve
from .catalyst import (
    CatalystProfile,
    apply_profile_row,
    compute_roots,
    make_profile,
    normalize,
    phi_bounded,
    phi_tilde,
    phi_unbounded,
)
from .directional import (
    HeatProblem,
    Ode2Problem,
    discretize_ode2,
    heat_coefficients,
    solve_heat_directional,
    solve_ode2,
)
from .engine import FluidState, Schedule, diffuse_site, init_fluid, residual_norm, run
from .report import SolveReport
from .stencil import (
    GridProblem,
    LinearSystem,
    Stability,
    StencilWeights,
    assemble_system,
    spectral_radius_estimate,
    validate_stability,
)

__version__ = "0.1.0"
