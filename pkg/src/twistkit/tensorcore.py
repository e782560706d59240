"""
Dense complex matrix and tensor-leg arithmetic.

Conventions used throughout the package: row-major, zero-based indices and
left-factor-major tensor products, i.e. the basis vector e_i (x) e_p of
C^a (x) C^b sits at index i*b + p. This is exactly what ``numpy.kron`` does.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import CapExceededError, DimensionError, NotSelfAdjointError

# dense matrices only; d**n above this is refused
MAX_DIM = 4096

EIG_RTOL = 1e-9


def as_matrix(A, square: bool = False) -> np.ndarray:
    """Coerce to a finite complex128 2-d array."""
    M = np.asarray(A, dtype=np.complex128)
    if M.ndim != 2:
        raise DimensionError(f"expected a matrix, got array of shape {M.shape}")
    if square and M.shape[0] != M.shape[1]:
        raise DimensionError(f"expected a square matrix, got shape {M.shape}")
    if not np.all(np.isfinite(M)):
        raise DimensionError("matrix has non-finite entries")
    return M


def check_dim(dim: int, max_dim: int = MAX_DIM) -> None:
    if dim > max_dim:
        raise CapExceededError(f"dimension {dim} exceeds cap {max_dim}")


def local_dim(T: np.ndarray) -> int:
    """Return d for a d^2 x d^2 matrix T."""
    n = T.shape[0]
    d = int(round(np.sqrt(n)))
    if d * d != n or T.shape[1] != n:
        raise DimensionError(f"matrix of shape {T.shape} is not d^2 x d^2")
    return d


@dataclass(frozen=True)
class LegIndex:
    k: int  # 1-based leg position, 1 <= k <= n-1
    n: int
    d: int

    def __post_init__(self):
        if self.d < 1:
            raise DimensionError(f"local dimension must be >= 1, got {self.d}")
        if not 1 <= self.k <= self.n - 1:
            raise DimensionError(f"leg {self.k} out of range 1..{self.n - 1}")


def kron(A, B) -> np.ndarray:
    return np.kron(as_matrix(A), as_matrix(B))


def identity(dim: int) -> np.ndarray:
    return np.eye(dim, dtype=np.complex128)


def flip(d: int) -> np.ndarray:
    """Tensor flip F on C^d (x) C^d."""
    F = np.zeros((d * d, d * d), dtype=np.complex128)
    for i in range(d):
        for j in range(d):
            F[j * d + i, i * d + j] = 1.0
    return F


def leg_embed(T, k: int, n: int, max_dim: int = MAX_DIM) -> np.ndarray:
    """1^(k-1) (x) T (x) 1^(n-k-1) on (C^d)^n, legs numbered from 1."""
    T = as_matrix(T, square=True)
    d = local_dim(T)
    LegIndex(k, n, d)
    check_dim(d**n, max_dim)
    left = identity(d ** (k - 1))
    right = identity(d ** (n - k - 1))
    return np.kron(np.kron(left, T), right)


def op_norm(A) -> float:
    A = as_matrix(A)
    if A.size == 0:
        return 0.0
    return float(np.linalg.norm(A, 2))


def dagger(A: np.ndarray) -> np.ndarray:
    return A.conj().T


def commutator(A: np.ndarray, B: np.ndarray) -> np.ndarray:
    return A @ B - B @ A


def selfadjoint_residual(A) -> float:
    A = as_matrix(A, square=True)
    return op_norm(A - dagger(A))


def hermitian_spectrum(A, tol: float = 1e-9) -> tuple[np.ndarray, np.ndarray]:
    """
    Eigenvalues (ascending) and orthonormal eigenvectors (columns) of a
    selfadjoint matrix. ``tol`` is relative to ``op_norm(A)``.
    """
    A = as_matrix(A, square=True)
    scale = max(op_norm(A), 1.0)
    if selfadjoint_residual(A) > tol * scale:
        raise NotSelfAdjointError(
            f"matrix is not selfadjoint (residual {selfadjoint_residual(A):.3e})"
        )
    H = 0.5 * (A + dagger(A))
    w, V = np.linalg.eigh(H)
    return w.astype(float), V


def hermitian_function(A, fn) -> np.ndarray:
    """Apply a scalar function to a selfadjoint matrix via its spectrum."""
    w, V = hermitian_spectrum(A)
    return (V * fn(w)) @ dagger(V)


def real_embed(A: np.ndarray) -> np.ndarray:
    """The real 2d x 2d matrix of the complex-linear map v -> A v on Re v (+) Im v."""
    return np.block([[A.real, -A.imag], [A.imag, A.real]])


def antilinear_real_embed(A: np.ndarray) -> np.ndarray:
    """The real 2d x 2d matrix of the antilinear map v -> A conj(v)."""
    return np.block([[A.real, A.imag], [A.imag, -A.real]])


def to_real(v: np.ndarray) -> np.ndarray:
    """Stack Re and Im of complex vectors (columns) into real vectors."""
    return np.concatenate([v.real, v.imag], axis=0)


def from_real(x: np.ndarray) -> np.ndarray:
    d = x.shape[0] // 2
    return x[:d] + 1j * x[d:]


def null_space(M: np.ndarray, rtol: float = 1e-9) -> np.ndarray:
    """Orthonormal basis (columns) of the numerical kernel of M."""
    if M.shape[0] == 0:
        return np.eye(M.shape[1], dtype=M.dtype)
    u, s, vh = np.linalg.svd(M)
    scale = s[0] if s.size and s[0] > 0 else 1.0
    rank = int(np.sum(s > rtol * scale))
    return vh[rank:].conj().T
