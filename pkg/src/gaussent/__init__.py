"""Covariance-matrix toolkit for Gaussian continuous-variable states."""

__version__ = "0.1.0"

from .covariance import (  # noqa: E402
    CovarianceMatrix,
    GaussianState,
    SimonInvariants,
    convert_convention,
    simon_invariants,
    simon_normal_form,
    symplectic_eigenvalues,
    symplectic_eigs_from_invariants,
    validate_cm,
    williamson,
)
from .entanglement import ModeSplit, is_ppt, log_negativity, partial_transpose_cm  # noqa: E402
from .symplectic import build_sigma, is_symplectic  # noqa: E402

__all__ = [
    "CovarianceMatrix", "GaussianState", "SimonInvariants", "ModeSplit",
    "build_sigma", "is_symplectic", "validate_cm", "symplectic_eigenvalues",
    "williamson", "simon_invariants", "symplectic_eigs_from_invariants",
    "simon_normal_form", "convert_convention", "partial_transpose_cm", "is_ppt",
    "log_negativity",
]
