"""Partial transposition of covariance matrices, PPT test, log-negativity."""
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .covariance import CovarianceMatrix, as_gamma, is_squeezed, symplectic_eigenvalues
from .exceptions import DimensionError
from .symplectic import _as_square_even
from .tolerances import TOL_ENTANGLED, TOL_UNC


@dataclass(frozen=True)
class ModeSplit:
    """Bipartition into the first ``n_a`` modes (party A) and the next ``n_b``."""
    n_a: int
    n_b: int

    def __post_init__(self):
        if int(self.n_a) != self.n_a or int(self.n_b) != self.n_b or self.n_a < 1 or self.n_b < 1:
            raise DimensionError(f"split sizes must be positive integers, got {self.n_a}:{self.n_b}")

    @property
    def modes(self) -> int:
        return self.n_a + self.n_b

    def check(self, M) -> None:
        n = np.shape(M)[0]
        if n != 2 * self.modes:
            raise DimensionError(f"split {self.n_a}:{self.n_b} does not fit a {n}x{n} matrix")

    @classmethod
    def default(cls, modes: int) -> "ModeSplit":
        """``1 | (N-1)``."""
        if modes < 2:
            raise DimensionError("a bipartition needs at least two modes")
        return cls(1, modes - 1)

    @classmethod
    def parse(cls, text: str) -> "ModeSplit":
        """Parse ``"A:B"``."""
        try:
            a, b = text.split(":")
            return cls(int(a), int(b))
        except (ValueError, AttributeError) as exc:
            raise DimensionError(f"cannot parse split {text!r}; expected A:B") from exc

    def __str__(self):
        return f"{self.n_a}:{self.n_b}"


def _resolve_split(M, split):
    if split is None:
        split = ModeSplit.default(np.shape(M)[0] // 2)
    split.check(M)
    return split


def swap_split(gamma, split: ModeSplit):
    """Reorder modes so that party B comes first; returns ``(gamma', split')``."""
    g = as_gamma(gamma)
    split.check(g)
    na = 2 * split.n_a
    idx = np.r_[na:g.shape[0], 0:na]
    return g[np.ix_(idx, idx)], ModeSplit(split.n_b, split.n_a)


def momentum_flip(split: ModeSplit, capital: bool = False) -> np.ndarray:
    """``M_A (+) I_B`` with ``M_A = (+) diag(1, -1)``; ``-M_A (+) I_B`` if ``capital``."""
    m_a = np.tile([1.0, -1.0], split.n_a)
    if capital:
        m_a = -m_a
    return np.diag(np.concatenate([m_a, np.ones(2 * split.n_b)]))


def partial_transpose_cm(gamma, split: Optional[ModeSplit] = None) -> np.ndarray:
    """Covariance matrix of the partial transpose with respect to party A.

    A :class:`CovarianceMatrix` stored in the capital convention is flipped
    with ``-M_A (+) I`` and the result returned in that same convention.
    """
    capital = isinstance(gamma, CovarianceMatrix) and gamma.convention == "capital"
    g = np.asarray(gamma.matrix if capital else as_gamma(gamma), dtype=float)
    g = _as_square_even(g)
    split = _resolve_split(g, split)
    F = momentum_flip(split, capital)
    return F @ g @ F


def pt_spectrum(gamma, split: Optional[ModeSplit] = None) -> np.ndarray:
    return symplectic_eigenvalues(partial_transpose_cm(as_gamma(gamma), split))


def is_ppt(gamma, split: Optional[ModeSplit] = None, tol: float = TOL_UNC) -> bool:
    """True iff every symplectic eigenvalue of the partial transpose is ``>= 1 - tol``."""
    return bool(pt_spectrum(gamma, split)[-1] >= 1.0 - tol)


@dataclass(frozen=True)
class NegativityReport:
    pt_spectrum: np.ndarray
    log_negativity: float
    entangled: bool
    ppt_sufficient: bool


def log_negativity_from_spectrum(spec) -> float:
    spec = np.asarray(spec, dtype=float)
    with np.errstate(divide="ignore"):
        return float(-np.sum(np.minimum(np.log(spec), 0.0)))


def log_negativity(gamma, split: Optional[ModeSplit] = None,
                   tol: float = TOL_ENTANGLED) -> NegativityReport:
    """Logarithmic negativity ``E_N = -sum_i min(ln s_i, 0)`` over the
    symplectic spectrum ``s`` of the partial transpose (natural log).

    ``ppt_sufficient`` is set for ``1|N`` splits, where a positive partial
    transpose implies separability.
    """
    g = as_gamma(gamma)
    split = _resolve_split(g, split)
    spec = pt_spectrum(g, split)
    en = log_negativity_from_spectrum(spec)
    return NegativityReport(
        pt_spectrum=spec,
        log_negativity=en,
        entangled=bool(en > tol),
        ppt_sufficient=bool(split.n_a == 1 or split.n_b == 1),
    )


def entangled_implies_squeezed_check(gamma, split: Optional[ModeSplit] = None) -> bool:
    """Material implication ``entangled -> squeezed`` for one state."""
    if not log_negativity(gamma, split).entangled:
        return True
    return is_squeezed(gamma)
