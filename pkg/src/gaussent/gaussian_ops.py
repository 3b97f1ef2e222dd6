"""Gaussian operations on covariance matrices.

Projections are computed with Schur complements in the capital convention
``Gamma = sigma gamma sigma^T``, ``D = sigma d``; inputs and outputs stay in
the gamma convention.
"""
from dataclasses import dataclass
from typing import Optional, Sequence, Tuple

import numpy as np

from .covariance import (
    CovarianceMatrix,
    GaussianState,
    as_gamma,
    mode_indices,
    validate_cm,
)
from .exceptions import (
    DimensionError,
    DomainError,
    NoiseConstraintError,
    NotPositiveError,
    SingularProjectionError,
)
from .symplectic import (
    _as_square_even,
    beam_splitter_5050,
    build_sigma,
    direct_sum,
    embed,
    require_symplectic,
)
from .tolerances import PINV_RCOND, TOL_UNC


@dataclass(frozen=True)
class ProjectionResult:
    """Conditional state of the unmeasured modes."""
    cm: CovarianceMatrix
    displacement: np.ndarray
    measured_modes: Tuple[int, ...]

    @property
    def state(self) -> GaussianState:
        return GaussianState(self.cm, self.displacement)


def _as_state(state) -> GaussianState:
    if isinstance(state, GaussianState):
        return state
    g = as_gamma(state)
    return GaussianState(CovarianceMatrix(g), np.zeros(g.shape[0]))


def _to_capital(g, d):
    sigma = build_sigma(g.shape[0] // 2)
    return sigma @ g @ sigma.T, sigma @ d


def _from_capital(G, D):
    sigma = build_sigma(G.shape[0] // 2)
    g = sigma.T @ G @ sigma
    return 0.5 * (g + g.T), sigma.T @ D


def _partition(total_modes, measured):
    measured = tuple(int(m) for m in measured)
    if len(set(measured)) != len(measured) or any(m < 0 or m >= total_modes for m in measured):
        raise DimensionError(f"invalid measured modes {measured} for {total_modes} modes")
    kept = tuple(m for m in range(total_modes) if m not in measured)
    if not kept:
        raise DimensionError("at least one mode must remain unmeasured")
    return kept, measured


def _schur_capital(G, D, kept, measured, G_w, D_w, pinv=False):
    ia, ib = mode_indices(kept), mode_indices(measured)
    A = G[np.ix_(ia, ia)]
    B = G[np.ix_(ib, ib)]
    C = G[np.ix_(ia, ib)]
    if pinv:
        inv = np.linalg.pinv(B + G_w, rcond=PINV_RCOND)
    else:
        M = B + G_w
        if np.linalg.cond(M) > 1.0 / PINV_RCOND:
            raise SingularProjectionError("Gamma_omega + B is singular", step="schur")
        inv = np.linalg.inv(M)
    Gp = A - C @ inv @ C.T
    Dp = D[ia] - C @ inv @ (D[ib] - D_w)
    return 0.5 * (Gp + Gp.T), Dp


def schur_project(state, target_cm, target_displacement=None,
                  measured: Optional[Sequence[int]] = None,
                  tol_unc: float = TOL_UNC) -> ProjectionResult:
    """Project the ``measured`` modes onto a Gaussian state.

    ``Gamma' = A - C (Gamma_w + B)^-1 C^T`` and
    ``D' = D_A - C (Gamma_w + B)^-1 (D_B - D_w)``.

    Parameters
    ----------
    state : GaussianState or array
        Full state (gamma convention).
    target_cm : CovarianceMatrix or array
        Covariance matrix of the projector; plain arrays are read as gamma.
    target_displacement : array, optional
        Displacement ``d_w`` of the projector (gamma convention), default 0.
    measured : sequence of int, optional
        0-based modes to measure; default the last ``target`` modes.
    """
    st = _as_state(state)
    N = st.modes
    g_w = as_gamma(target_cm)
    g_w = _as_square_even(g_w, "target_cm")
    n_w = g_w.shape[0] // 2
    if measured is None:
        measured = range(N - n_w, N)
    kept, measured = _partition(N, measured)
    if len(measured) != n_w:
        raise DimensionError(f"target has {n_w} modes but {len(measured)} are measured")
    d_w = np.zeros(2 * n_w) if target_displacement is None else np.asarray(target_displacement, float)
    G, D = _to_capital(np.asarray(st.cm.gamma), st.displacement)
    G_w, D_w = _to_capital(g_w, d_w)
    Gp, Dp = _schur_capital(G, D, kept, measured, G_w, D_w)
    gp, dp = _from_capital(Gp, Dp)
    return ProjectionResult(validate_cm(gp, tol_unc), dp, measured)


def homodyne_cm(eps: float, modes: int = 1) -> np.ndarray:
    """Pointer state of width ``eps``: ``diag(eps^2, 1/eps^2)`` per mode (gamma)."""
    if not np.isfinite(eps) or eps <= 0:
        raise DomainError(f"homodyne width must be positive, got {eps!r}")
    return np.diag(np.tile([eps ** 2, eps ** -2], modes))


def _outcomes(x, n):
    x = np.broadcast_to(np.asarray(x, dtype=float), (n,))
    return np.ravel(np.column_stack([x, np.zeros(n)]))


def homodyne_project(state, eps: float, x=0.0, measured: Optional[Sequence[int]] = None,
                     tol_unc: float = TOL_UNC) -> ProjectionResult:
    """Homodyne detection of ``x`` with finite width ``eps``.

    The pointer has ``gamma = diag(eps^2, 1/eps^2)`` (``Gamma = diag(1/eps^2,
    eps^2)``) and displacement ``(x, 0)``; the outcome ``x`` moves only the
    displacement.  Default: measure the last mode.
    """
    st = _as_state(state)
    if measured is None:
        measured = (st.modes - 1,)
    n = len(tuple(measured))
    return schur_project(st, homodyne_cm(eps, n), _outcomes(x, n), measured, tol_unc)


def homodyne_project_limit(state, x=0.0, measured: Optional[Sequence[int]] = None,
                           tol_unc: float = TOL_UNC) -> ProjectionResult:
    """Ideal homodyne detection (``eps -> 0``) via the Moore-Penrose inverse.

    In the capital convention ``(Gamma_eps + B)^-1 -> (P B P)^+`` with ``P``
    projecting on the second quadrature of each measured mode.
    """
    st = _as_state(state)
    N = st.modes
    if measured is None:
        measured = (N - 1,)
    kept, measured = _partition(N, measured)
    n = len(measured)
    G, D = _to_capital(np.asarray(st.cm.gamma), st.displacement)
    ib = mode_indices(measured)
    P = np.diag(np.tile([0.0, 1.0], n))
    B = G[np.ix_(ib, ib)]
    ia = mode_indices(kept)
    C = G[np.ix_(ia, ib)]
    inv = np.linalg.pinv(P @ B @ P, rcond=PINV_RCOND)
    D_w = build_sigma(n) @ _outcomes(x, n)
    Gp = G[np.ix_(ia, ia)] - C @ inv @ C.T
    Dp = D[ia] - C @ inv @ (D[ib] - D_w)
    gp, dp = _from_capital(0.5 * (Gp + Gp.T), Dp)
    return ProjectionResult(validate_cm(gp, tol_unc), dp, measured)


def coherent_project(state, alpha=0.0, measured: Optional[Sequence[int]] = None,
                     tol_unc: float = TOL_UNC) -> ProjectionResult:
    """Project onto a coherent state: ``A - C (B + I)^-1 C^T``."""
    st = _as_state(state)
    if measured is None:
        measured = (st.modes - 1,)
    n = len(tuple(measured))
    alpha = np.broadcast_to(np.asarray(alpha, dtype=complex), (n,))
    d_w = np.sqrt(2.0) * np.ravel(np.column_stack([alpha.real, alpha.imag]))
    return schur_project(st, np.eye(2 * n), d_w, measured, tol_unc)


@dataclass(frozen=True)
class PipelineResult:
    """Homodyne pipeline output next to the closed-form coherent projection."""
    pipeline: ProjectionResult
    closed_form: np.ndarray
    max_difference: float


def coherent_project_via_homodyne(state, eps: float = 1.0, x: float = 0.0, y: float = 0.0,
                                  tol_unc: float = TOL_UNC) -> PipelineResult:
    """Coherent projection of mode 2 built from two homodyne detections.

    Steps: adjoin vacuum as mode 3, 50:50 beam splitter on modes 2-3, the
    quarter-period phase shifter ``sigma`` on mode 3, homodyne on mode 2 with
    outcome ``x``, homodyne on the former mode 3 with outcome ``y``.  The
    covariance matrix does not depend on ``eps``.
    """
    st = _as_state(state)
    if st.modes != 2:
        raise DimensionError("the homodyne pipeline is defined for two-mode states")
    g = np.asarray(st.cm.gamma)
    g3 = direct_sum(g, np.eye(2))
    d3 = np.concatenate([st.displacement, np.zeros(2)])
    T = embed(build_sigma(1), [2], 3) @ embed(beam_splitter_5050(), [1, 2], 3)
    g3 = T @ g3 @ T.T
    # intermediate states are valid but the unmeasured mode is near-singular
    # for extreme eps, so validation is left to the end
    step = _schur_gamma(0.5 * (g3 + g3.T), T @ d3, [1], homodyne_cm(eps), _outcomes(x, 1))
    final = _schur_gamma(step[0], step[1], [1], homodyne_cm(eps), _outcomes(y, 1))
    A, B, C = g[:2, :2], g[2:, 2:], g[:2, 2:]
    closed = A - C @ np.linalg.solve(B + np.eye(2), C.T)
    closed = 0.5 * (closed + closed.T)
    res = ProjectionResult(validate_cm(final[0], tol_unc), final[1], (1, 2))
    return PipelineResult(res, closed, float(np.max(np.abs(final[0] - closed))))


def _schur_gamma(g, d, measured, g_w, d_w):
    N = g.shape[0] // 2
    kept, measured = _partition(N, measured)
    G, D = _to_capital(g, d)
    G_w, D_w = _to_capital(g_w, d_w)
    Gp, Dp = _schur_capital(G, D, kept, measured, G_w, D_w)
    return _from_capital(Gp, Dp)


# noise and channels

def _require_psd(M, name):
    M = np.asarray(M, dtype=float)
    if M.ndim != 2 or M.shape[0] != M.shape[1]:
        raise DimensionError(f"{name} must be square")
    lam = float(np.linalg.eigvalsh(0.5 * (M + M.T))[0])
    if lam < -1e-12 * max(1.0, float(np.max(np.abs(M)))):
        raise NotPositiveError(f"{name} is not positive semidefinite (min eig {lam:.3e})", lam)
    return 0.5 * (M + M.T)


def add_classical_noise(gamma, delta, tol_unc: float = TOL_UNC) -> CovarianceMatrix:
    """``gamma + delta`` for positive semidefinite ``delta``."""
    g = as_gamma(gamma)
    delta = _require_psd(delta, "noise")
    if delta.shape != g.shape:
        raise DimensionError(f"noise {delta.shape} does not match {g.shape}")
    return validate_cm(g + delta, tol_unc)


@dataclass(frozen=True)
class ChannelSpec:
    """Gaussian channel from a symplectic dilation.

    ``gamma_s' = S_s gamma_s S_s^T + G`` with ``G = S_c gamma_e S_c^T``.
    """
    system_block: np.ndarray
    coupling_block: np.ndarray
    environment_cm: np.ndarray
    full_transform: Optional[np.ndarray] = None

    @classmethod
    def from_dilation(cls, S, system_modes: int, environment_cm) -> "ChannelSpec":
        S = require_symplectic(S)
        g_e = as_gamma(environment_cm)
        validate_cm(g_e)
        k = 2 * system_modes
        if S.shape[0] != k + g_e.shape[0]:
            raise DimensionError("dilation size does not match system plus environment")
        return cls(S[:k, :k].copy(), S[:k, k:].copy(), g_e, S)

    @property
    def noise(self) -> np.ndarray:
        G = self.coupling_block @ self.environment_cm @ self.coupling_block.T
        return 0.5 * (G + G.T)


def noise_constraint_margin(S_s, G) -> float:
    """Smallest eigenvalue of ``G + i sigma - i S_s sigma S_s^T``."""
    S_s = np.asarray(S_s, dtype=float)
    G = np.asarray(G, dtype=float)
    if S_s.shape != G.shape or S_s.shape[0] % 2:
        raise DimensionError("S_s and G must be equal-size, even-dimensional")
    sigma = build_sigma(S_s.shape[0] // 2)
    H = 0.5 * (G + G.T) + 1j * sigma - 1j * (S_s @ sigma @ S_s.T)
    return float(np.linalg.eigvalsh(0.5 * (H + H.conj().T))[0])


def check_noise_constraint(S_s, G, tol: float = TOL_UNC) -> bool:
    return noise_constraint_margin(S_s, G) >= -tol


def apply_channel(spec: ChannelSpec, gamma, tol: float = TOL_UNC):
    """Apply a channel; returns ``(gamma', G)``.

    Raises :class:`NoiseConstraintError` if the noise is too small.
    """
    g = as_gamma(gamma)
    G = spec.noise
    margin = noise_constraint_margin(spec.system_block, G)
    if margin < -tol:
        raise NoiseConstraintError(f"noise constraint violated (margin {margin:.3e})", margin)
    S = spec.system_block
    out = S @ g @ S.T + G
    return validate_cm(0.5 * (out + out.T)), G


@dataclass(frozen=True)
class CollectiveResult:
    transformed: np.ndarray
    central_block: np.ndarray
    det_sum: float
    det_sum_direct: float
    entries: Tuple[float, float, float]


def collective_det_sum(gamma) -> CollectiveResult:
    """``det(A + B)`` from three entries of a two-copy measurement.

    On ``gamma (+) gamma`` a 50:50 beam splitter mixes the second mode of the
    first copy with the first mode of the second copy; the block of the
    second output mode is ``(A + B) / 2``.
    """
    g = as_gamma(gamma)
    if g.shape != (4, 4):
        raise DimensionError("two-mode matrix required")
    T = embed(beam_splitter_5050(), [1, 2], 4)
    big = T @ direct_sum(g, g) @ T.T
    big = 0.5 * (big + big.T)
    central = big[2:4, 2:4]
    g11, g12, g22 = float(central[0, 0]), float(central[0, 1]), float(central[1, 1])
    det_sum = 4.0 * (g11 * g22 - g12 * g12)
    direct = float(np.linalg.det(g[:2, :2] + g[2:, 2:]))
    return CollectiveResult(big, central, det_sum, direct, (g11, g22, g12))
