"""
Finite-dimensional standard subspaces H of C^d.

An antiunitary J is stored as a unitary C with J v = C conj(v) in the fixed
basis. Real-linear maps on C^d (the Tomita operator, kernels, complements)
are handled as 2d x 2d real matrices acting on Re v (+) Im v.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable

import numpy as np

from .errors import (
    CompatibilityError,
    DimensionError,
    ModularConditionError,
    NotSelfAdjointError,
    StandardnessError,
)
from .tensorcore import (
    antilinear_real_embed,
    as_matrix,
    commutator,
    dagger,
    from_real,
    hermitian_function,
    hermitian_spectrum,
    identity,
    local_dim,
    null_space,
    op_norm,
    to_real,
)

DEFAULT_TOL = 1e-9


@dataclass(frozen=True)
class Antilinear:
    """The antilinear map v -> M conj(v)."""

    M: np.ndarray

    def __call__(self, v: np.ndarray) -> np.ndarray:
        return self.M @ np.conj(v)

    def after(self, A: np.ndarray) -> "Antilinear":
        """self o A for a linear A."""
        return Antilinear(self.M @ np.conj(A))

    def before(self, A: np.ndarray) -> "Antilinear":
        """A o self for a linear A."""
        return Antilinear(A @ self.M)

    def compose(self, other: "Antilinear") -> np.ndarray:
        """self o other, which is linear."""
        return self.M @ np.conj(other.M)

    def conjugate(self, A: np.ndarray) -> np.ndarray:
        """self o A o self, linear."""
        return self.M @ np.conj(A) @ np.conj(self.M)

    def real_matrix(self) -> np.ndarray:
        return antilinear_real_embed(self.M)


@dataclass(frozen=True)
class StandardSubspace:
    d: int
    J_unitary_part: np.ndarray
    delta: np.ndarray
    real_basis: np.ndarray  # columns span H over the reals

    @property
    def J(self) -> Antilinear:
        return Antilinear(self.J_unitary_part)

    @property
    def delta_sqrt(self) -> np.ndarray:
        return hermitian_function(self.delta, np.sqrt)

    def delta_it(self, t: float) -> np.ndarray:
        return hermitian_function(self.delta, lambda w: np.exp(1j * t * np.log(w)))

    @property
    def tomita(self) -> Antilinear:
        """S_H = J Delta^(1/2)."""
        return self.J.after(self.delta_sqrt)

    def is_maximally_abelian(self, tol: float = DEFAULT_TOL) -> bool:
        return op_norm(self.delta - identity(self.d)) <= tol


def _check_pair(C: np.ndarray, delta: np.ndarray, tol: float) -> None:
    d = C.shape[0]
    if delta.shape != (d, d):
        raise DimensionError(f"J part is {C.shape}, delta is {delta.shape}")
    if op_norm(C @ dagger(C) - identity(d)) > tol:
        raise ModularConditionError("J_unitary_part is not unitary")
    J = Antilinear(C)
    if op_norm(J.compose(J) - identity(d)) > tol:
        raise ModularConditionError("J is not an involution (C conj(C) != 1)")
    try:
        w, _ = hermitian_spectrum(delta, tol)
    except NotSelfAdjointError as exc:
        raise ModularConditionError(str(exc)) from exc
    if w[0] <= 0:
        raise ModularConditionError(f"delta is not strictly positive (min eigenvalue {w[0]:.3e})")
    half = hermitian_function(delta, np.sqrt)
    minus_half = hermitian_function(delta, lambda x: 1 / np.sqrt(x))
    res = op_norm(J.conjugate(half) - minus_half)
    if res > tol * max(1.0, op_norm(half)):
        raise ModularConditionError(f"J Delta^(1/2) J != Delta^(-1/2) (residual {res:.3e})")


def from_modular_pair(C, delta, tol: float = DEFAULT_TOL) -> StandardSubspace:
    """H = ker(J Delta^(1/2) - 1), solved as a real-linear kernel."""
    C = as_matrix(C, square=True)
    delta = as_matrix(delta, square=True)
    _check_pair(C, delta, tol)
    d = C.shape[0]
    S = Antilinear(C).after(hermitian_function(delta, np.sqrt))
    K = null_space(S.real_matrix() - np.eye(2 * d), rtol=1e-8)
    if K.shape[1] != d:
        raise StandardnessError(f"kernel of S - 1 has real dimension {K.shape[1]}, expected {d}")
    return StandardSubspace(d, C, 0.5 * (delta + dagger(delta)), from_real(K).astype(np.complex128))


def from_real_basis(vectors, tol: float = 1e-10) -> StandardSubspace:
    """
    Modular data of the real span of d vectors in C^d (given as columns, or
    as a list of vectors). The Tomita operator is S = A conj with
    A = B conj(B)^-1 for the basis matrix B; then Delta = conj(A^* A) and
    J = S Delta^(-1/2).
    """
    B = _basis_matrix(vectors)
    d = B.shape[0]
    s = np.linalg.svd(B, compute_uv=False)
    if s[-1] <= tol * s[0]:
        raise StandardnessError("vectors do not span a standard subspace (H cap iH != 0 "
                                "or H + iH is not the whole space)")
    A = B @ np.linalg.inv(np.conj(B))
    delta = np.conj(dagger(A) @ A)
    delta = 0.5 * (delta + dagger(delta))
    C = A @ np.conj(hermitian_function(delta, lambda x: 1 / np.sqrt(x)))
    return StandardSubspace(d, C, delta, B)


def _basis_matrix(vectors) -> np.ndarray:
    if isinstance(vectors, np.ndarray) and vectors.ndim == 2:
        B = as_matrix(vectors)
    else:
        B = as_matrix(np.column_stack([np.asarray(v, dtype=np.complex128) for v in vectors]))
    if B.shape[0] != B.shape[1]:
        raise StandardnessError(f"need exactly d vectors in C^d, got {B.shape[1]} in C^{B.shape[0]}")
    return B


def from_involution(j: Iterable[int]) -> StandardSubspace:
    """Maximally abelian H = ker(1 - J) for J the antilinear extension of a point involution."""
    j = list(j)
    m = len(j)
    C = np.zeros((m, m), dtype=np.complex128)
    for x, y in enumerate(j):
        C[y, x] = 1.0
    return from_modular_pair(C, identity(m))


def symplectic_complement(H: StandardSubspace) -> StandardSubspace:
    """H' = {psi : Im<psi, h> = 0 for all h in H}."""
    B = H.real_basis
    # Im <x + iy, h> = x . Im h - y . Re h
    M = np.hstack([B.imag.T, -B.real.T])
    K = null_space(M, rtol=1e-10)
    if K.shape[1] != H.d:
        raise StandardnessError(f"complement has real dimension {K.shape[1]}, expected {H.d}")
    return from_real_basis(from_real(K))


def real_orthonormal(vectors: np.ndarray) -> np.ndarray:
    Q, _ = np.linalg.qr(to_real(vectors))
    return Q


def subspace_distance(A: np.ndarray, B: np.ndarray) -> float:
    """
    Largest principal angle between the real spans of the columns of A and B
    (both in C^d). Computed from the sine, which stays accurate for small angles.
    """
    Qa = real_orthonormal(A)
    Qb = real_orthonormal(B)
    if Qa.shape[1] != Qb.shape[1]:
        return float(np.pi / 2)
    s1 = np.linalg.norm(Qb - Qa @ (Qa.T @ Qb), 2)
    s2 = np.linalg.norm(Qa - Qb @ (Qb.T @ Qa), 2)
    return float(np.arcsin(min(1.0, max(s1, s2))))


def modular_flow_check(H: StandardSubspace, t_samples: Iterable[float], delta=None) -> float:
    """
    max_t dist(Delta^(it) H, H). Passing ``delta`` replaces the subspace's own
    modular operator (used for negative controls).
    """
    D = H.delta if delta is None else as_matrix(delta, square=True)
    worst = 0.0
    for t in t_samples:
        U = hermitian_function(D, lambda w: np.exp(1j * t * np.log(w)))
        worst = max(worst, subspace_distance(U @ H.real_basis, H.real_basis))
    return worst


def compatibility(T, H: StandardSubspace, tol: float = DEFAULT_TOL) -> tuple[bool, float]:
    """[T, Delta (x) Delta] = 0, equivalent to commuting with all Delta^(it) (x) Delta^(it)."""
    T = as_matrix(T, square=True)
    if local_dim(T) != H.d:
        raise CompatibilityError(f"twist on d={local_dim(T)}, subspace on d={H.d}")
    DD = np.kron(H.delta, H.delta)
    res = op_norm(commutator(T, DD))
    return res <= tol, res


def modular_residuals(H: StandardSubspace) -> dict:
    """J^2 = 1, J Delta J = Delta^-1 and S h = h on the real basis."""
    d = H.d
    J = H.J
    return {
        "J_squared": op_norm(J.compose(J) - identity(d)),
        "J_delta_J": op_norm(J.conjugate(H.delta) - np.linalg.inv(H.delta)),
        "tomita_fixes_basis": op_norm(H.tomita(H.real_basis) - H.real_basis),
    }
