"""Fractional-gradient-constrained variational inequalities."""

from ._fracvi import (
    Grid,
    Problem,
    frac_divergence,
    frac_gradient,
    frac_laplacian,
    load_problem,
    penalty_k,
    riesz_potential,
    run,
    solve,
)

__all__ = [
    "Grid",
    "Problem",
    "frac_divergence",
    "frac_gradient",
    "frac_laplacian",
    "load_problem",
    "penalty_k",
    "riesz_potential",
    "run",
    "solve",
]
