"""Exception hierarchy.

Every error raised on purpose by the package derives from :class:`GaussentError`
and from the closest builtin (``ValueError`` / ``ArithmeticError``) so callers
can catch either.
"""


class GaussentError(Exception):
    """Base class for all package errors."""


class DimensionError(GaussentError, ValueError):
    """Matrix or split has the wrong shape (odd size, mismatch, zero modes)."""


class DomainError(GaussentError, ValueError):
    """A scalar parameter lies outside its admissible range."""


class NotSymplecticError(GaussentError, ValueError):
    """A matrix that must be symplectic is not."""


class NotPositiveError(GaussentError, ValueError):
    """A matrix that must be positive semidefinite is indefinite."""

    def __init__(self, message, min_eigenvalue=None):
        super().__init__(message)
        self.min_eigenvalue = min_eigenvalue


class SymmetryError(GaussentError, ValueError):
    """Matrix is not symmetric within tolerance."""

    def __init__(self, message, asymmetry=None):
        super().__init__(message)
        self.asymmetry = asymmetry


class UncertaintyError(GaussentError, ValueError):
    """Matrix violates gamma + i sigma >= 0."""

    def __init__(self, message, min_eigenvalue=None):
        super().__init__(message)
        self.min_eigenvalue = min_eigenvalue


class DegenerateInputError(GaussentError, ArithmeticError):
    """Input is singular where an invertible one is required.

    ``step`` names the stage of a multi-step procedure that failed, if any.
    """

    def __init__(self, message, step=None):
        super().__init__(message)
        self.step = step


class InconsistentInvariantsError(GaussentError, ValueError):
    """Simon invariants give a negative discriminant."""


class SingularProjectionError(DegenerateInputError):
    """(Gamma_omega + B) is not invertible in a Schur-complement projection."""


class NoiseConstraintError(GaussentError, ValueError):
    """Channel noise violates G + i sigma - i S sigma S^T >= 0."""

    def __init__(self, message, margin=None):
        super().__init__(message)
        self.margin = margin


class CertificationError(GaussentError, ValueError):
    """A matrix fails the entanglement-witness certificate."""

    def __init__(self, message, str_global=None, str_split=None, min_eigenvalue=None):
        super().__init__(message)
        self.str_global = str_global
        self.str_split = str_split
        self.min_eigenvalue = min_eigenvalue


class InvalidPlanError(GaussentError, ValueError):
    """Monte-Carlo measurement plan is not usable."""
