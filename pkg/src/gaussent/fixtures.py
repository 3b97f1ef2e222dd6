"""Reference matrices shipped with the package."""
import numpy as np

from .covariance import squeezed_cm, thermal_cm, vacuum_cm


def reference_cm() -> np.ndarray:
    """Two-mode reference state used in the Monte-Carlo comparison.

    Symplectic spectrum ``(sqrt 5.5, sqrt 3)``; partial transpose
    ``(sqrt 33, 1/sqrt 2)``.
    """
    return np.array([
        [3.5, 0.0, 2.5, 0.0],
        [0.0, 3.0, 0.0, -2.5],
        [2.5, 0.0, 3.5, 0.0],
        [0.0, -2.5, 0.0, 3.0],
    ])


def mixed_one_mode_cm() -> np.ndarray:
    """One-mode ``[[3, 1], [1, 1]]``; symplectic eigenvalue ``sqrt 2``."""
    return np.array([[3.0, 1.0], [1.0, 1.0]])


def symmetric_family_cm(a: float, b: float) -> np.ndarray:
    """``[[a,0,b,0],[0,a,0,-b],[b,0,a,0],[0,-b,0,a]]``; PT spectrum ``{a+b, a-b}``."""
    return np.array([
        [a, 0.0, b, 0.0],
        [0.0, a, 0.0, -b],
        [b, 0.0, a, 0.0],
        [0.0, -b, 0.0, a],
    ], dtype=float)


def symmetric_family_witness() -> np.ndarray:
    """Witness with ``tr[Z gamma] = a - b`` on :func:`symmetric_family_cm`."""
    return 0.25 * np.array([
        [1.0, 0.0, -1.0, 0.0],
        [0.0, 1.0, 0.0, 1.0],
        [-1.0, 0.0, 1.0, 0.0],
        [0.0, 1.0, 0.0, 1.0],
    ])


FIXTURES = {
    "reference": reference_cm,
    "mixed1": mixed_one_mode_cm,
    "symmetric": lambda: symmetric_family_cm(2.0, 1.5),
    "vacuum2": lambda: np.array(vacuum_cm(2).matrix),
    "thermal2": lambda: np.array(thermal_cm([2.0, 2.0]).matrix),
    "squeezed1": lambda: np.array(squeezed_cm(0.5).matrix),
}


def get_fixture(name: str) -> np.ndarray:
    try:
        return FIXTURES[name]()
    except KeyError:
        raise KeyError(f"unknown fixture {name!r}; choose from {sorted(FIXTURES)}") from None
