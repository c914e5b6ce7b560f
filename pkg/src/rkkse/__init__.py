"""Reproducing-kernel collocation solver for the time-fractional
Kudryashov-Sinelshchikov equation: series approximations, reference
validation and error-table reproduction.
"""

__version__ = "0.1.0"

from rkkse._core import BACKEND
from rkkse.fracalc import (
    FractionalOrder,
    PiecewisePolynomial,
    caputo_monomial,
    caputo_numeric,
    caputo_piecewise,
    gamma_fn,
)
from rkkse.kernels import TensorKernel, reconstruct_kernel, rk1, rk2, rk4, verify_kernel
from rkkse.operator import KseProblem, caputo_f, lifting_f, residual
from rkkse.basis import CollocationBasis, make_collocation, orthonormalize
from rkkse.solver import ApproximateSolution, error_sequence, solve
from rkkse.metrics import ErrorReport, emit_surface, l2_error, linf_error

__all__ = [
    "BACKEND",
    "FractionalOrder",
    "PiecewisePolynomial",
    "caputo_monomial",
    "caputo_numeric",
    "caputo_piecewise",
    "gamma_fn",
    "TensorKernel",
    "reconstruct_kernel",
    "rk1",
    "rk2",
    "rk4",
    "verify_kernel",
    "KseProblem",
    "caputo_f",
    "lifting_f",
    "residual",
    "CollocationBasis",
    "make_collocation",
    "orthonormalize",
    "ApproximateSolution",
    "error_sequence",
    "solve",
    "ErrorReport",
    "emit_surface",
    "l2_error",
    "linf_error",
]
