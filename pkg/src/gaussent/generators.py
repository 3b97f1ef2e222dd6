"""Random symplectic matrices and covariance matrices for tests and sweeps.

Every function takes a ``numpy.random.Generator``.
"""
import numpy as np
from scipy.stats import unitary_group

from .symplectic import direct_sum, squeezer, to_interleaved_order


def random_unitary(n: int, rng: np.random.Generator) -> np.ndarray:
    return unitary_group.rvs(n, random_state=rng) if n > 1 else np.exp(2j * np.pi * rng.random((1, 1)))


def random_passive(modes: int, rng: np.random.Generator) -> np.ndarray:
    """Orthogonal symplectic matrix from a Haar-random unitary ``X + iY``.

    In block ordering the real form is ``[[X, -Y], [Y, X]]``.
    """
    U = random_unitary(modes, rng)
    X, Y = U.real, U.imag
    return to_interleaved_order(np.block([[X, -Y], [Y, X]]))


def random_symplectic(modes: int, rng: np.random.Generator, max_r: float = 1.0) -> np.ndarray:
    """``K1 D K2`` with passive ``K`` and squeezing ``|r| <= max_r``."""
    r = rng.uniform(-max_r, max_r, modes)
    D = direct_sum(*[squeezer(np.exp(x)) for x in r])
    return random_passive(modes, rng) @ D @ random_passive(modes, rng)


def random_cm(modes: int, rng: np.random.Generator, max_r: float = 1.0,
              max_nu: float = 3.0) -> np.ndarray:
    """``S diag(nu) S^T`` with random symplectic ``S`` and ``nu_k in [1, max_nu]``."""
    nu = rng.uniform(1.0, max_nu, modes)
    S = random_symplectic(modes, rng, max_r)
    g = S @ np.diag(np.repeat(nu, 2)) @ S.T
    return 0.5 * (g + g.T)


def random_psd(n: int, rng: np.random.Generator, scale: float = 1.0) -> np.ndarray:
    X = rng.normal(size=(n, n)) * np.sqrt(scale / n)
    return X @ X.T


def random_separable_cm(n_a: int, n_b: int, rng: np.random.Generator,
                        noise: float = 0.5) -> np.ndarray:
    """``gamma_A (+) gamma_B + P`` with random local states and ``P >= 0``."""
    g = direct_sum(random_cm(n_a, rng), random_cm(n_b, rng))
    return g + random_psd(g.shape[0], rng, noise * rng.random())


def two_mode_squeezed_cm(r: float) -> np.ndarray:
    """Pure two-mode squeezed vacuum; ``c = -d = sinh 2r``."""
    ch, sh = np.cosh(2 * r), np.sinh(2 * r)
    return np.array([[ch, 0, sh, 0], [0, ch, 0, -sh], [sh, 0, ch, 0], [0, -sh, 0, ch]])


def random_entangled_two_mode(rng: np.random.Generator) -> np.ndarray:
    """Entangled two-mode CM: local symplectics and small noise on a
    two-mode squeezed state.  Entanglement is checked by the caller."""
    r = rng.uniform(0.2, 1.0)
    S = direct_sum(random_symplectic(1, rng, 0.7), random_symplectic(1, rng, 0.7))
    g = S @ two_mode_squeezed_cm(r) @ S.T
    g = g + random_psd(4, rng, 0.2 * rng.random())
    return 0.5 * (g + g.T)
