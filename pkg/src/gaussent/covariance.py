"""Covariance matrices: data model, validity, standard states, normal forms.

The internal convention is the real symmetric matrix ``gamma`` with
``gamma + i sigma >= 0``.  The alternative ``Gamma = sigma gamma sigma^T`` is
carried by the ``convention`` flag and converted with :func:`convert_convention`.
"""
from dataclasses import dataclass
from typing import Sequence, Tuple

import numpy as np

from .exceptions import (
    DegenerateInputError,
    DimensionError,
    DomainError,
    InconsistentInvariantsError,
    NotPositiveError,
    SymmetryError,
    UncertaintyError,
)
from .symplectic import _as_square_even, build_sigma, direct_sum
from .tolerances import EIG_CLIP, TOL_PURE, TOL_SYM, TOL_UNC

CONVENTIONS = ("gamma", "capital")


@dataclass(frozen=True, eq=False)
class CovarianceMatrix:
    """A validated covariance matrix.

    Attributes
    ----------
    matrix : ndarray, shape (2N, 2N)
        Stored matrix; read-only.
    convention : {"gamma", "capital"}
        Whether ``matrix`` is ``gamma`` or ``Gamma = sigma gamma sigma^T``.
    """
    matrix: np.ndarray
    convention: str = "gamma"

    def __post_init__(self):
        m = np.array(self.matrix, dtype=float)
        m.setflags(write=False)
        object.__setattr__(self, "matrix", m)
        if self.convention not in CONVENTIONS:
            raise DomainError(f"unknown convention {self.convention!r}")

    @property
    def modes(self) -> int:
        return self.matrix.shape[0] // 2

    @property
    def gamma(self) -> np.ndarray:
        """The matrix in the ``gamma`` convention."""
        if self.convention == "gamma":
            return self.matrix
        return _flip(self.matrix)

    def __array__(self, dtype=None, copy=None):
        return np.asarray(self.gamma, dtype=dtype)


@dataclass(frozen=True, eq=False)
class GaussianState:
    """Covariance matrix plus displacement ``d`` (gamma convention)."""
    cm: CovarianceMatrix
    displacement: np.ndarray

    def __post_init__(self):
        d = np.array(self.displacement, dtype=float).reshape(-1)
        if d.size != 2 * self.cm.modes:
            raise DimensionError(f"displacement of length {d.size} for {self.cm.modes} modes")
        d.setflags(write=False)
        object.__setattr__(self, "displacement", d)

    @property
    def modes(self) -> int:
        return self.cm.modes

    @property
    def capital_displacement(self) -> np.ndarray:
        """``D = sigma d``."""
        return build_sigma(self.modes) @ self.displacement


def as_gamma(M) -> np.ndarray:
    """Return a float ndarray in the gamma convention (CovarianceMatrix aware)."""
    if isinstance(M, CovarianceMatrix):
        return np.array(M.gamma)
    if isinstance(M, GaussianState):
        return np.array(M.cm.gamma)
    return np.asarray(M, dtype=float)


def _flip(M):
    sigma = build_sigma(M.shape[0] // 2)
    out = sigma @ M @ sigma.T
    return 0.5 * (out + out.T)


def convert_convention(M) -> np.ndarray:
    """Map ``gamma -> sigma gamma sigma^T``; the map is its own inverse.

    For a :class:`CovarianceMatrix` a new object with the other flag is returned.
    """
    if isinstance(M, CovarianceMatrix):
        other = "capital" if M.convention == "gamma" else "gamma"
        return CovarianceMatrix(_flip(M.matrix), other)
    return _flip(_as_square_even(M))


# validity

def asymmetry(M) -> float:
    M = np.asarray(M, dtype=float)
    return float(np.max(np.abs(M - M.T)))


def uncertainty_min_eig(M) -> float:
    """Smallest eigenvalue of the Hermitian matrix ``M + i sigma``."""
    M = np.asarray(M, dtype=float)
    sigma = build_sigma(M.shape[0] // 2)
    return float(np.linalg.eigvalsh(0.5 * (M + M.T) + 1j * sigma)[0])


def cm_diagnostics(M, tol_unc: float = TOL_UNC) -> dict:
    """Check both validity conditions without raising.

    Returns a dict with ``valid``, ``asymmetry``, ``symmetry_tol``,
    ``uncertainty_min_eig`` and ``tol_unc``.
    """
    M = _as_square_even(M)
    sym_tol = TOL_SYM * max(1.0, float(np.max(np.abs(M))))
    asym = asymmetry(M)
    lam = uncertainty_min_eig(M)
    return {
        "valid": bool(asym <= sym_tol and lam >= -tol_unc),
        "symmetric": bool(asym <= sym_tol),
        "asymmetry": asym,
        "symmetry_tol": sym_tol,
        "uncertainty_min_eig": lam,
        "tol_unc": tol_unc,
    }


def validate_cm(M, tol_unc: float = TOL_UNC, convention: str = "gamma") -> CovarianceMatrix:
    """Validate and wrap a covariance matrix.

    Raises
    ------
    DimensionError
        Not square or odd dimension.
    SymmetryError
        ``max|M - M^T|`` above ``1e-12 * max(1, max|M|)``.
    UncertaintyError
        ``min eig(M + i sigma) < -tol_unc``; the eigenvalue is attached.
    """
    if isinstance(M, CovarianceMatrix):
        M = M.matrix if M.convention == convention else convert_convention(M).matrix
    diag = cm_diagnostics(M, tol_unc)
    if not diag["symmetric"]:
        raise SymmetryError(
            f"matrix not symmetric (max deviation {diag['asymmetry']:.3e})", diag["asymmetry"]
        )
    if diag["uncertainty_min_eig"] < -tol_unc:
        lam = diag["uncertainty_min_eig"]
        raise UncertaintyError(f"uncertainty relation violated (min eigenvalue {lam:.6g})", lam)
    M = np.asarray(M, dtype=float)
    return CovarianceMatrix(0.5 * (M + M.T), convention)


def is_valid_cm(M, tol_unc: float = TOL_UNC) -> bool:
    return cm_diagnostics(as_gamma(M), tol_unc)["valid"]


# symplectic spectra

def symplectic_eigenvalues(A) -> np.ndarray:
    """Symplectic eigenvalues of a positive semidefinite matrix, descending.

    Computed as the positive eigenvalues of ``i A^{1/2} sigma A^{1/2}``, which
    has the same spectrum as ``i sigma A``; singular directions give zeros.

    Examples
    --------
    >>> symplectic_eigenvalues([[3.0, 1.0], [1.0, 1.0]])
    array([1.41421356])
    """
    A = as_gamma(A)
    A = _as_square_even(A)
    A = 0.5 * (A + A.T)
    N = A.shape[0] // 2
    w, V = np.linalg.eigh(A)
    if w[0] < -1e-9 * max(1.0, abs(w[-1])):
        raise NotPositiveError(f"matrix is indefinite (min eigenvalue {w[0]:.3e})", float(w[0]))
    root = (V * np.sqrt(np.clip(w, 0.0, None))) @ V.T
    K = root @ build_sigma(N) @ root
    ev = np.linalg.eigvalsh(1j * K)
    return np.clip(ev[::-1][:N], 0.0, None)


def williamson(gamma) -> Tuple[np.ndarray, np.ndarray]:
    """Williamson normal form.

    Returns ``(S, s)`` with ``S`` symplectic, ``s`` descending and
    ``S gamma S^T = diag(s1, s1, ..., sN, sN)``.

    Raises
    ------
    DegenerateInputError
        If ``gamma`` is not strictly positive definite.
    """
    V = _as_square_even(as_gamma(gamma))
    V = 0.5 * (V + V.T)
    N = V.shape[0] // 2
    w, E = np.linalg.eigh(V)
    if w[0] <= EIG_CLIP * max(1.0, abs(w[-1])):
        raise DegenerateInputError(
            f"matrix is not strictly positive (min eigenvalue {w[0]:.3e})", step="williamson"
        )
    inv_root = (E / np.sqrt(w)) @ E.T
    W = inv_root @ build_sigma(N) @ inv_root
    t, U = np.linalg.eigh(1j * W)
    # eigenvalues come as -t_N..-t_1, t_1..t_N with t ascending
    t, U = t[N:], U[:, N:]
    cols = []
    for k in range(N):
        u = U[:, k] * np.sqrt(2.0)
        cols.extend([u.imag, u.real])
    O = np.column_stack(cols)
    s = 1.0 / t
    S = np.diag(np.repeat(np.sqrt(s), 2)) @ O.T @ inv_root
    return S, s


def williamson_form(s) -> np.ndarray:
    """``diag(s1, s1, ..., sN, sN)``."""
    return np.diag(np.repeat(np.asarray(s, dtype=float), 2))


# two-mode invariants

def _two_mode_blocks(gamma):
    g = _as_square_even(as_gamma(gamma))
    if g.shape != (4, 4):
        raise DimensionError(f"two-mode matrix required, got {g.shape}")
    return g[:2, :2], g[2:, 2:], g[:2, 2:]


@dataclass(frozen=True)
class SimonInvariants:
    """Local invariants ``a = sqrt det A``, ``b = sqrt det B``, ``cd = det C``."""
    a: float
    b: float
    cd: float
    det_gamma: float


def simon_invariants(gamma) -> SimonInvariants:
    A, B, C = _two_mode_blocks(gamma)
    g = as_gamma(gamma)
    return SimonInvariants(
        a=float(np.sqrt(max(np.linalg.det(A), 0.0))),
        b=float(np.sqrt(max(np.linalg.det(B), 0.0))),
        cd=float(np.linalg.det(C)),
        det_gamma=float(np.linalg.det(g)),
    )


def symplectic_eigs_from_invariants(inv: SimonInvariants, transposed: bool = False,
                                    tol: float = 1e-9) -> np.ndarray:
    """Closed-form two-mode symplectic spectrum from the local invariants.

    ``Delta = a^2 + b^2 + 2 cd`` (``- 2 cd`` for the partial transpose) and
    ``s_pm = sqrt((Delta pm sqrt(Delta^2 - 4 det)) / 2)``.
    """
    cd = -inv.cd if transposed else inv.cd
    delta = inv.a ** 2 + inv.b ** 2 + 2.0 * cd
    disc = delta ** 2 - 4.0 * inv.det_gamma
    scale = max(1.0, delta ** 2)
    if disc < -tol * scale:
        raise InconsistentInvariantsError(f"negative discriminant {disc:.3e}")
    root = np.sqrt(max(disc, 0.0))
    hi = 0.5 * (delta + root)
    # the small root loses digits when hi >> lo; use the product instead
    lo = inv.det_gamma / hi if hi > 0 else 0.0
    return np.sqrt(np.clip([hi, lo], 0.0, None))


def _local_williamson_2x2(A):
    # a multiple of the identity is already normal; keep S = I
    if np.max(np.abs(A - A[0, 0] * np.eye(2))) <= TOL_SYM * max(1.0, abs(A[0, 0])):
        return np.eye(2), float(A[0, 0])
    S, s = williamson(A)
    return S, float(s[0])


def _diagonalizing_rotations(Cp):
    """Rotations ``R1, R2`` with ``R1 Cp R2^T = diag(c, d)``, ``c >= |d|``, ``c >= 0``."""
    scale = max(1.0, float(np.max(np.abs(Cp))))
    if max(abs(Cp[0, 1]), abs(Cp[1, 0])) <= TOL_SYM * scale and abs(Cp[0, 0]) >= abs(Cp[1, 1]):
        R = np.eye(2) if Cp[0, 0] >= 0 else -np.eye(2)
        return R, np.eye(2)
    U, sv, Vt = np.linalg.svd(Cp)
    V = Vt.T
    if np.linalg.det(U) < 0:
        U[:, 1] *= -1
    if np.linalg.det(V) < 0:
        V[:, 1] *= -1
    return U.T, V.T


def simon_normal_form(gamma) -> Tuple[np.ndarray, np.ndarray]:
    """Simon normal form by local symplectic congruence.

    Returns ``(S_local, gamma_snf)`` where ``S_local = S1 (+) S2`` and
    ``gamma_snf = [[a I, diag(c, d)], [diag(c, d), b I]]`` with ``c >= 0``
    and ``sign(d) = sign(det C)``.
    """
    A, B, C = _two_mode_blocks(gamma)
    g = as_gamma(gamma)
    SA, _ = _local_williamson_2x2(A)
    SB, _ = _local_williamson_2x2(B)
    R1, R2 = _diagonalizing_rotations(SA @ C @ SB.T)
    S_local = direct_sum(R1 @ SA, R2 @ SB)
    snf = S_local @ g @ S_local.T
    return S_local, 0.5 * (snf + snf.T)


def snf_eigenvalues(a: float, b: float, c: float, d: float) -> np.ndarray:
    """Ordinary eigenvalues of a Simon-normal-form matrix, ascending."""
    out = []
    for x in (c, d):
        r = 0.5 * np.sqrt((a - b) ** 2 + 4.0 * x ** 2)
        out.extend([0.5 * (a + b) - r, 0.5 * (a + b) + r])
    return np.sort(out)


# purity, squeezing

def is_pure(gamma, tol: float = TOL_PURE) -> bool:
    return bool(abs(np.linalg.det(as_gamma(gamma)) - 1.0) <= tol)


def is_squeezed(gamma, tol: float = TOL_UNC) -> bool:
    """True iff the smallest ordinary eigenvalue is below ``1 - tol``."""
    return bool(np.linalg.eigvalsh(as_gamma(gamma))[0] < 1.0 - tol)


# standard states

def vacuum_cm(modes: int) -> CovarianceMatrix:
    if int(modes) != modes or modes < 1:
        raise DimensionError(f"modes must be a positive integer, got {modes!r}")
    return CovarianceMatrix(np.eye(2 * int(modes)))


def coherent_state(alpha) -> GaussianState:
    """Coherent state with amplitudes ``alpha`` (one complex number per mode)."""
    alpha = np.atleast_1d(np.asarray(alpha, dtype=complex))
    d = np.sqrt(2.0) * np.ravel(np.column_stack([alpha.real, alpha.imag]))
    return GaussianState(vacuum_cm(alpha.size), d)


def squeezed_cm(r: float, phi: float = 0.0) -> CovarianceMatrix:
    """One-mode squeezed vacuum; ``phi = 0`` gives ``diag(e^{2r}, e^{-2r})``."""
    ch, sh = np.cosh(2 * r), np.sinh(2 * r)
    m = np.array([[ch + sh * np.cos(phi), sh * np.sin(phi)],
                  [sh * np.sin(phi), ch - sh * np.cos(phi)]])
    return CovarianceMatrix(m)


def thermal_cm(nu) -> CovarianceMatrix:
    """Thermal state ``(+)_k nu_k I``; each ``nu_k = coth(beta omega / 2) >= 1``."""
    nu = np.atleast_1d(np.asarray(nu, dtype=float))
    if np.any(nu < 1.0) or not np.all(np.isfinite(nu)):
        raise DomainError(f"thermal parameters must be >= 1, got {nu}")
    return CovarianceMatrix(np.diag(np.repeat(nu, 2)))


def thermal_nu(beta_omega: float) -> float:
    """``coth(beta omega / 2)`` for ``beta omega > 0``."""
    if beta_omega <= 0:
        raise DomainError("beta * omega must be positive")
    return float(1.0 / np.tanh(0.5 * beta_omega))


def mode_indices(modes: Sequence[int]) -> np.ndarray:
    return np.concatenate([[2 * m, 2 * m + 1] for m in modes]).astype(int)


def reduced_cm(gamma, modes: Sequence[int]) -> np.ndarray:
    """Principal submatrix on the given (0-based) modes."""
    g = as_gamma(gamma)
    idx = mode_indices(modes)
    return g[np.ix_(idx, idx)].copy()
