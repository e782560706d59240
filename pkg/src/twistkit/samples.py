"""Seeded random generators for twists and standard subspaces."""

from __future__ import annotations

import numpy as np

from .subspace import StandardSubspace, from_real_basis
from .tensorcore import dagger, flip


def haar_unitary(d: int, rng: np.random.Generator) -> np.ndarray:
    Z = (rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d))) / np.sqrt(2)
    Q, R = np.linalg.qr(Z)
    return Q * (np.diag(R) / np.abs(np.diag(R)))


def random_hermitian(D: int, rng: np.random.Generator) -> np.ndarray:
    Z = rng.standard_normal((D, D)) + 1j * rng.standard_normal((D, D))
    return 0.5 * (Z + dagger(Z))


def random_selfadjoint_twist(d: int, rng: np.random.Generator, norm: float = 0.5) -> np.ndarray:
    """Selfadjoint T on C^d (x) C^d scaled to operator norm ``norm``."""
    A = random_hermitian(d * d, rng)
    return norm * A / np.linalg.norm(A, 2)


def random_positive_twist(d: int, rng: np.random.Generator, norm: float = 1.0) -> np.ndarray:
    """Positive semidefinite T with operator norm ``norm``."""
    Z = rng.standard_normal((d * d, d * d)) + 1j * rng.standard_normal((d * d, d * d))
    A = Z @ dagger(Z)
    return norm * A / np.linalg.norm(A, 2)


def q_flip(q: float, d: int) -> np.ndarray:
    return q * flip(d)


def random_standard_subspace(d: int, rng: np.random.Generator,
                             smin: float = 0.5, smax: float = 2.0) -> StandardSubspace:
    """Real span of the columns of U1 diag(s) U2 with s in [smin, smax], so well conditioned."""
    s = rng.uniform(smin, smax, size=d)
    B = haar_unitary(d, rng) @ np.diag(s) @ haar_unitary(d, rng)
    return from_real_basis(B)
