"""Symplectic form, symplectic matrices, optical elements and decompositions.

All matrices use mode-interleaved phase-space ordering ``(x1, p1, ..., xN, pN)``.
Use :func:`to_block_order` / :func:`to_interleaved_order` to move between this
ordering and the block ordering ``(x1, ..., xN, p1, ..., pN)``.
"""
from dataclasses import dataclass, field
from typing import List, Tuple

import numpy as np

from .exceptions import DimensionError, DomainError, NotSymplecticError
from .tolerances import EIG_CLIP, TOL_SYMP

_J = np.array([[0.0, 1.0], [-1.0, 0.0]])


def _as_square_even(M, name="matrix"):
    M = np.asarray(M, dtype=float)
    if M.ndim != 2 or M.shape[0] != M.shape[1]:
        raise DimensionError(f"{name} must be square, got shape {M.shape}")
    if M.shape[0] == 0 or M.shape[0] % 2:
        raise DimensionError(f"{name} must have even, nonzero dimension, got {M.shape[0]}")
    return M


def n_modes(M) -> int:
    """Number of modes of a 2N x 2N matrix (or a 2N vector)."""
    n = np.shape(M)[0]
    if n == 0 or n % 2:
        raise DimensionError(f"dimension {n} is not a positive even number")
    return n // 2


def build_sigma(modes: int) -> np.ndarray:
    """Symplectic form ``sigma = (+)_k [[0, 1], [-1, 0]]`` for ``modes`` modes.

    Examples
    --------
    >>> build_sigma(1)
    array([[ 0.,  1.],
           [-1.,  0.]])
    """
    if int(modes) != modes or modes < 1:
        raise DimensionError(f"modes must be a positive integer, got {modes!r}")
    return np.kron(np.eye(int(modes)), _J)


def block_permutation(modes: int) -> np.ndarray:
    """Index array ``p`` such that ``v[p]`` reorders interleaved -> block.

    Block ordering is ``(x1..xN, p1..pN)``.
    """
    return np.concatenate([np.arange(0, 2 * modes, 2), np.arange(1, 2 * modes, 2)])


def to_block_order(M):
    """Reorder a vector or matrix from interleaved to ``(x..x, p..p)`` ordering."""
    M = np.asarray(M, dtype=float)
    p = block_permutation(n_modes(M))
    return M[p] if M.ndim == 1 else M[np.ix_(p, p)]


def to_interleaved_order(M):
    """Inverse of :func:`to_block_order`."""
    M = np.asarray(M, dtype=float)
    inv = np.argsort(block_permutation(n_modes(M)))
    return M[inv] if M.ndim == 1 else M[np.ix_(inv, inv)]


def symplectic_residual(M) -> float:
    """``max |M sigma M^T - sigma|``."""
    M = _as_square_even(M)
    sigma = build_sigma(M.shape[0] // 2)
    return float(np.max(np.abs(M @ sigma @ M.T - sigma)))


def is_symplectic(M, tol: float = TOL_SYMP) -> bool:
    """True iff ``||M sigma M^T - sigma||_max <= tol``."""
    return symplectic_residual(M) <= tol


def is_passive(S, tol: float = TOL_SYMP) -> bool:
    """True iff ``S`` is symplectic and orthogonal (an element of K(N))."""
    S = _as_square_even(S)
    if not is_symplectic(S, tol):
        return False
    return float(np.max(np.abs(S.T @ S - np.eye(S.shape[0])))) <= tol


def require_symplectic(S, tol: float = TOL_SYMP) -> np.ndarray:
    S = _as_square_even(S, "S")
    res = symplectic_residual(S)
    if res > tol:
        raise NotSymplecticError(f"matrix is not symplectic (residual {res:.3e} > {tol:.1e})")
    return S


def symplectic_inverse(S) -> np.ndarray:
    """``S^-1 = -sigma S^T sigma`` for symplectic ``S``."""
    S = np.asarray(S, dtype=float)
    sigma = build_sigma(n_modes(S))
    return -sigma @ S.T @ sigma


# optical elements

def beam_splitter_5050() -> np.ndarray:
    """Two-mode 50:50 beam splitter ``(1/sqrt 2) [[I, -I], [I, I]]``."""
    eye = np.eye(2)
    return np.block([[eye, -eye], [eye, eye]]) / np.sqrt(2.0)


def phase_shifter(angle: float) -> np.ndarray:
    """One-mode rotation ``[[cos t, sin t], [-sin t, cos t]]``.

    ``phase_shifter(pi/2)`` equals the one-mode symplectic form.
    """
    c, s = np.cos(angle), np.sin(angle)
    return np.array([[c, s], [-s, c]])


def squeezer(d: float) -> np.ndarray:
    """One-mode squeezer ``diag(d, 1/d)``; ``d = exp(r)``."""
    if not np.isfinite(d) or d <= 0:
        raise DomainError(f"squeezing parameter must be positive, got {d!r}")
    return np.diag([float(d), 1.0 / d])


def direct_sum(*blocks) -> np.ndarray:
    """Block-diagonal direct sum of square matrices."""
    blocks = [np.atleast_2d(np.asarray(b, dtype=float)) for b in blocks]
    n = sum(b.shape[0] for b in blocks)
    out = np.zeros((n, n))
    i = 0
    for b in blocks:
        k = b.shape[0]
        out[i:i + k, i:i + k] = b
        i += k
    return out


def embed(S, modes: List[int], total_modes: int) -> np.ndarray:
    """Embed a transform acting on ``modes`` (0-based) into ``total_modes`` modes."""
    S = np.asarray(S, dtype=float)
    idx = np.concatenate([[2 * m, 2 * m + 1] for m in modes]).astype(int)
    if S.shape != (idx.size, idx.size):
        raise DimensionError(f"transform of shape {S.shape} does not match {len(modes)} modes")
    out = np.eye(2 * total_modes)
    out[np.ix_(idx, idx)] = S
    return out


def apply_congruence(S, gamma) -> np.ndarray:
    """``S gamma S^T``, symmetrized."""
    S = np.asarray(S, dtype=float)
    gamma = np.asarray(gamma, dtype=float)
    if S.ndim != 2 or gamma.ndim != 2 or S.shape[1] != gamma.shape[0] or gamma.shape[0] != gamma.shape[1]:
        raise DimensionError(f"cannot congruence {gamma.shape} by {S.shape}")
    out = S @ gamma @ S.T
    return 0.5 * (out + out.T)


# decompositions

@dataclass(frozen=True)
class Decomposition:
    """Factorization of a symplectic matrix.

    ``kind == "polar"``: ``factors = [P, U]`` with ``S = P @ U``.
    ``kind == "euler"``: ``factors = [U1, D, U2]`` with ``S = U1 @ D @ U2`` and
    ``squeezing_values`` the ``d_i >= 1`` on the diagonal of ``D``.
    """
    kind: str
    factors: Tuple[np.ndarray, ...]
    squeezing_values: Tuple[float, ...] = field(default=())

    def product(self) -> np.ndarray:
        out = self.factors[0]
        for f in self.factors[1:]:
            out = out @ f
        return out


def _sym_sqrt(M):
    w, V = np.linalg.eigh(0.5 * (M + M.T))
    w = np.clip(w, EIG_CLIP, None)
    return (V * np.sqrt(w)) @ V.T, (V / np.sqrt(w)) @ V.T


def polar_decompose(S, tol: float = TOL_SYMP) -> Decomposition:
    """Polar factors ``S = P U``: ``P = sqrt(S S^T)`` in Pi(N), ``U`` in K(N)."""
    S = require_symplectic(S, tol)
    P, P_inv = _sym_sqrt(S @ S.T)
    U = P_inv @ S
    return Decomposition("polar", (P, U))


def _symplectic_basis_of_unit_space(V, sigma):
    """Orthonormal columns pairing ``(v, -sigma v)`` spanning the columns of V."""
    cols = []
    rest = V.copy()
    while rest.shape[1] > 0:
        # pick the best-conditioned direction left
        norms = np.linalg.norm(rest, axis=0)
        v = rest[:, int(np.argmax(norms))]
        v = v / np.linalg.norm(v)
        w = -sigma @ v
        w = w - v * (v @ w)
        w = w / np.linalg.norm(w)
        cols.extend([v, w])
        Q = np.column_stack([v, w])
        rest = rest - Q @ (Q.T @ rest)
        # drop directions that are now numerically gone
        u, s, _ = np.linalg.svd(rest, full_matrices=False)
        rest = u[:, s > 1e-8] * 1.0
    return cols


def euler_decompose(S, tol: float = TOL_SYMP) -> Decomposition:
    """Euler (Bloch-Messiah) factors ``S = U1 D U2``.

    ``U1``, ``U2`` are passive and ``D = diag(d1, 1/d1, ..., dN, 1/dN)`` with
    ``d1 >= d2 >= ... >= 1``.
    """
    S = require_symplectic(S, tol)
    N = S.shape[0] // 2
    sigma = build_sigma(N)
    P, U = polar_decompose(S, tol).factors
    lam, V = np.linalg.eigh(P)
    order = np.argsort(lam)[::-1]
    lam, V = lam[order], V[:, order]

    big = lam > 1.0 + 1e-10
    n_big = int(np.sum(big))
    pairs = []
    for k in range(n_big):
        v = V[:, k]
        pairs.append((lam[k], v, -sigma @ v))
    n_unit = 2 * (N - n_big)
    if n_unit > 0:
        # eigenvalues near 1 sit in the middle of the descending list
        unit = V[:, n_big:n_big + n_unit]
        cols = _symplectic_basis_of_unit_space(unit, sigma)
        for j in range(0, len(cols), 2):
            pairs.append((1.0, cols[j], cols[j + 1]))
    pairs.sort(key=lambda t: -t[0])
    O = np.column_stack([c for _, v, w in pairs for c in (v, w)])
    Dm = O.T @ P @ O
    d = np.array([Dm[2 * k, 2 * k] for k in range(N)])
    D = np.diag(np.ravel(np.column_stack([d, 1.0 / d])))
    return Decomposition("euler", (O, D, O.T @ U), tuple(float(x) for x in d))
