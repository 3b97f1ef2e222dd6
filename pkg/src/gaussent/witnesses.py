"""Covariance-matrix entanglement witnesses.

A witness for the split ``A|B`` is a positive symmetric ``Z`` whose diagonal
mode blocks satisfy ``str[Z_A] + str[Z_B] >= 1/2``.  Every separable ``gamma``
then gives ``tr[Z gamma] >= 1``, and ``m = tr[Z gamma] < 1`` bounds the
log-negativity from below by ``ln(1/m)``.
"""
from dataclasses import dataclass, field
from typing import Iterable, Optional, Sequence

import numpy as np
from scipy.optimize import minimize_scalar

from .covariance import GaussianState, as_gamma, symplectic_eigenvalues, williamson
from .entanglement import ModeSplit, _resolve_split, momentum_flip, partial_transpose_cm
from .exceptions import (
    CertificationError,
    DimensionError,
    DomainError,
    SymmetryError,
)
from .symplectic import _as_square_even
from .tolerances import TOL_CERT, TOL_SYM

GLOBAL = "global_witness"
SPLIT = "split_witness"
NOT_WITNESS = "not_witness"

DUAN_GRID_SIZE = 401
DUAN_GRID_RANGE = (1e-2, 1e2)


def symplectic_trace(A) -> float:
    """Sum of the symplectic eigenvalues, zeros included."""
    return float(np.sum(symplectic_eigenvalues(A)))


@dataclass(frozen=True)
class Certificate:
    status: str
    min_eigenvalue: float
    str_global: float
    str_split: float

    @property
    def is_witness(self) -> bool:
        return self.status != NOT_WITNESS


def certify_witness(Z, split: Optional[ModeSplit] = None, tol: float = TOL_CERT) -> Certificate:
    """Classify ``Z`` as a global witness, split witness or neither.

    Global: ``Z >= 0`` and ``str[Z] >= 1/2``.  Split: ``Z >= 0`` and
    ``str[Z_A] + str[Z_B] >= 1/2``.  Global implies split.
    """
    Z = _as_square_even(Z, "Z")
    if np.max(np.abs(Z - Z.T)) > TOL_SYM * max(1.0, float(np.max(np.abs(Z)))):
        raise SymmetryError("witness matrix is not symmetric")
    Z = 0.5 * (Z + Z.T)
    split = _resolve_split(Z, split)
    lam = float(np.linalg.eigvalsh(Z)[0])
    na = 2 * split.n_a
    if lam < -tol:
        return Certificate(NOT_WITNESS, lam, float("nan"), float("nan"))
    # clip tiny negative eigenvalues so the symplectic spectra are defined
    w, V = np.linalg.eigh(Z)
    Zp = (V * np.clip(w, 0.0, None)) @ V.T
    s_glob = symplectic_trace(Zp)
    s_split = symplectic_trace(Zp[:na, :na]) + symplectic_trace(Zp[na:, na:])
    if s_glob >= 0.5 - tol:
        status = GLOBAL
    elif s_split >= 0.5 - tol:
        status = SPLIT
    else:
        status = NOT_WITNESS
    return Certificate(status, lam, s_glob, s_split)


@dataclass(frozen=True)
class Witness:
    """A certified witness matrix."""
    matrix: np.ndarray
    split: ModeSplit
    certificate: Certificate
    label: str = ""

    @property
    def modes(self) -> int:
        return self.matrix.shape[0] // 2


def make_witness(Z, split: Optional[ModeSplit] = None, label: str = "",
                 tol: float = TOL_CERT) -> Witness:
    """Certify ``Z`` and wrap it; raises :class:`CertificationError` if it fails."""
    Z = np.asarray(Z, dtype=float)
    split = _resolve_split(Z, split)
    cert = certify_witness(Z, split, tol)
    if not cert.is_witness:
        raise CertificationError(
            f"not an entanglement witness (min eig {cert.min_eigenvalue:.3e}, "
            f"str split {cert.str_split:.6g})",
            str_global=cert.str_global, str_split=cert.str_split,
            min_eigenvalue=cert.min_eigenvalue,
        )
    return Witness(0.5 * (Z + Z.T), split, cert, label)


@dataclass(frozen=True)
class WitnessOutcome:
    """Result of evaluating a witness.

    ``value`` is ``m = tr[Z gamma]``; ``p_bound`` equals ``m`` (the state is
    not p-separable for any ``p > m``); ``logneg_lower_bound`` is
    ``ln(1/m)`` for ``0 < m < 1`` and 0 otherwise.
    """
    value: float
    expectation_with_displacement: float
    p_bound: float
    logneg_lower_bound: float


def witness_value(Z, state) -> WitnessOutcome:
    """Evaluate ``tr[Z gamma]`` and ``tr[Z gamma] + 2 d^T Z d``."""
    Zm = Z.matrix if isinstance(Z, Witness) else np.asarray(Z, dtype=float)
    g = as_gamma(state)
    if Zm.shape != g.shape:
        raise DimensionError(f"witness {Zm.shape} and state {g.shape} differ in size")
    d = state.displacement if isinstance(state, GaussianState) else np.zeros(g.shape[0])
    m = float(np.sum(Zm * g))
    bound = float(np.log(1.0 / m)) if 0.0 < m < 1.0 else 0.0
    return WitnessOutcome(m, m + 2.0 * float(d @ Zm @ d), m, bound)


def p_separability_level(gamma, split: Optional[ModeSplit] = None,
                         witnesses: Optional[Iterable] = None) -> float:
    """Smallest witness value over a family; an upper bound on ``p_min``.

    With ``witnesses=None`` on a two-mode state the exact value, the smallest
    symplectic eigenvalue of the partial transpose, is returned.
    """
    g = as_gamma(gamma)
    split = _resolve_split(g, split)
    if witnesses is None:
        if split.modes != 2:
            raise DimensionError("exact p_min is only available for two modes; pass a family")
        return float(symplectic_eigenvalues(partial_transpose_cm(g, split))[-1])
    vals = [witness_value(Z, g).value for Z in witnesses]
    if not vals:
        raise DomainError("empty witness family")
    return float(min(vals))


def is_p_separable(gamma, p: float, split: Optional[ModeSplit] = None) -> bool:
    """Decide p-separability for ``1|N`` splits via PPT of ``gamma / p``."""
    from .entanglement import is_ppt

    g = as_gamma(gamma)
    split = _resolve_split(g, split)
    if p <= 0:
        raise DomainError("p must be positive")
    if split.n_a != 1 and split.n_b != 1:
        raise DimensionError("p-separability is decided only for 1|N splits")
    return is_ppt(g / p, split)


def minimal_witness_two_mode(gamma, split: Optional[ModeSplit] = None):
    """Witness attaining the smallest value ``m_min`` on a two-mode state.

    With ``S`` the symplectic map bringing the partial transpose to
    Williamson form, ``Z' = 1/2 S^T P S`` where ``P`` projects on the mode with
    the smallest symplectic eigenvalue, and ``Z`` undoes the momentum flip.
    Then ``tr[Z gamma] = m_min`` and ``str[Z_A] + str[Z_B] >= 1/2``.

    Returns
    -------
    (Witness, float)
    """
    g = as_gamma(gamma)
    split = _resolve_split(g, split)
    if split.modes != 2:
        raise DimensionError("minimal witness construction needs two modes")
    S, s = williamson(partial_transpose_cm(g, split))
    proj = np.zeros((4, 4))
    proj[2:, 2:] = np.eye(2)
    Zp = 0.5 * S.T @ proj @ S
    F = momentum_flip(split)
    Z = F @ Zp @ F
    w = make_witness(Z, split, label="minimal")
    return w, float(s[-1])


def duan_witness(a: float) -> Witness:
    """Duan family member ``Z_a`` (two modes, split 1|1)."""
    if a == 0 or not np.isfinite(a):
        raise DomainError("Duan parameter must be finite and nonzero")
    a = float(a)
    a2, sg = a * a, np.sign(a)
    Z = np.array([
        [a2, 0.0, sg, 0.0],
        [0.0, a2, 0.0, -sg],
        [sg, 0.0, 1.0 / a2, 0.0],
        [0.0, -sg, 0.0, 1.0 / a2],
    ]) / (2.0 * (a2 + 1.0 / a2))
    return make_witness(Z, ModeSplit(1, 1), label=f"duan a={a:g}")


def duan_grid(size: int = DUAN_GRID_SIZE, lo: float = DUAN_GRID_RANGE[0],
              hi: float = DUAN_GRID_RANGE[1], both_signs: bool = True) -> np.ndarray:
    """Log-spaced ``|a|`` grid; with ``both_signs`` the negatives are appended."""
    pos = np.logspace(np.log10(lo), np.log10(hi), size)
    return np.concatenate([pos, -pos]) if both_signs else pos


def _duan_value(a, g):
    a2, sg = a * a, np.sign(a)
    num = a2 * (g[0, 0] + g[1, 1]) + (g[2, 2] + g[3, 3]) / a2 + 2.0 * sg * (g[0, 2] - g[1, 3])
    return num / (2.0 * (a2 + 1.0 / a2))


@dataclass(frozen=True)
class DuanScanResult:
    value: float
    a: float
    grid_value: float
    grid_a: float
    values: np.ndarray = field(repr=False)


def duan_scan(gamma, grid: Optional[Sequence[float]] = None, refine: bool = True) -> DuanScanResult:
    """Minimize ``tr[Z_a gamma]`` over ``a``.

    The grid minimum (first index on ties) is refined by golden-section search
    between its neighbours on the same sign branch.
    """
    g = as_gamma(gamma)
    if g.shape != (4, 4):
        raise DimensionError("Duan witnesses act on two modes")
    grid = duan_grid() if grid is None else np.asarray(grid, dtype=float)
    if grid.size == 0 or np.any(grid == 0):
        raise DomainError("grid must be non-empty and exclude zero")
    vals = np.array([_duan_value(a, g) for a in grid])
    k = int(np.argmin(vals))
    best_a, best = float(grid[k]), float(vals[k])
    if refine:
        sign = np.sign(best_a)
        same = np.sort(np.abs(grid[np.sign(grid) == sign]))
        j = int(np.searchsorted(same, abs(best_a)))
        lo = np.log(same[max(j - 1, 0)])
        hi = np.log(same[min(j + 1, same.size - 1)])
        if hi > lo:
            res = minimize_scalar(lambda t: _duan_value(sign * np.exp(t), g),
                                  bracket=(lo, hi), method="golden")
            cand = sign * float(np.exp(np.clip(res.x, lo, hi)))
            cv = float(_duan_value(cand, g))
            if cv < best:
                best_a, best = cand, cv
    return DuanScanResult(best, best_a, float(vals[k]), float(grid[k]), vals)
