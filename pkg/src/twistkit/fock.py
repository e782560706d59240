"""
Truncated twisted Fock space F_T(C^d) with levels 0..N.

Level n is stored in quotient coordinates: the columns of Q_n are the
eigenvectors of P_{T,n} with eigenvalue above the rank threshold, and the
twisted Gram matrix is diagonal with those eigenvalues. A class [Psi] has
coordinates Q_n^* Psi and <[Psi], [Phi]>_T = <Psi, P_{T,n} Phi>. Operators
act on the direct sum of all levels; adjoints are taken w.r.t. the twisted
Gram matrix.

Identities with p creation/annihilation factors are only evaluated on levels
<= N - p; creation out of level N is truncated to zero.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field

import numpy as np

from .errors import (
    CompatibilityError,
    KernelNotPreservedError,
    LevelCapError,
    NotATwistError,
    TwistkitError,
    YBEViolationError,
)
from .permgroup import permutation_operator
from .subspace import StandardSubspace, compatibility, symplectic_complement
from .tensorcore import as_matrix, dagger, flip, hermitian_spectrum, local_dim, op_norm
from .twist import DEFAULT_EPS_RANK, DEFAULT_TOL, check_ybe, kernel_threshold, p_left

KERNEL_TOL = 1e-8


@dataclass
class FockLevel:
    n: int
    Q: np.ndarray  # d^n x r, orthonormal lift of the quotient
    gram: np.ndarray  # r retained eigenvalues of P_{T,n}
    K: np.ndarray  # d^n x k, orthonormal basis of ker P_{T,n}

    @property
    def dim(self) -> int:
        return self.Q.shape[1]

    @property
    def kernel_dim(self) -> int:
        return self.K.shape[1]


@dataclass
class TwistedFockSpace:
    T: np.ndarray
    d: int
    N: int
    eps_rank: float
    levels: list[FockLevel]
    offsets: list[int] = field(init=False)

    def __post_init__(self):
        self.offsets = [0]
        for lv in self.levels:
            self.offsets.append(self.offsets[-1] + lv.dim)

    @property
    def total_dim(self) -> int:
        return self.offsets[-1]

    @property
    def gram(self) -> np.ndarray:
        return np.concatenate([lv.gram for lv in self.levels])

    def span(self, n: int) -> slice:
        return slice(self.offsets[n], self.offsets[n + 1])

    def upto(self, n: int) -> slice:
        return slice(0, self.offsets[n + 1])

    @property
    def vacuum(self) -> np.ndarray:
        v = np.zeros(self.total_dim, dtype=np.complex128)
        v[0] = 1.0
        return v

    def vector(self, n: int, psi) -> np.ndarray:
        """Quotient coordinates of the class of a tensor psi in (C^d)^n."""
        v = np.zeros(self.total_dim, dtype=np.complex128)
        v[self.span(n)] = dagger(self.levels[n].Q) @ np.asarray(psi, dtype=np.complex128).ravel()
        return v

    def inner(self, u: np.ndarray, v: np.ndarray) -> complex:
        return complex(np.vdot(u, self.gram * v))

    def norm(self, v: np.ndarray) -> float:
        return float(np.sqrt(max(self.inner(v, v).real, 0.0)))

    def star(self, A: np.ndarray) -> np.ndarray:
        """Adjoint w.r.t. the twisted inner product: G^-1 A^* G."""
        g = self.gram
        return (dagger(A) * g[None, :]) / g[:, None]

    def restricted_norm(self, A: np.ndarray, level_cap: int) -> float:
        """max over twisted-unit quotient basis vectors v at levels <= level_cap of ||A v||_T."""
        cols = self.upto(level_cap)
        g = self.gram
        sub = A[:, cols]
        norms = np.sqrt(np.sum(g[:, None] * np.abs(sub) ** 2, axis=0) / g[cols])
        return float(norms.max()) if norms.size else 0.0


@dataclass
class LevelOperator:
    """Linear operator on the truncated Fock space in quotient coordinates."""

    space: TwistedFockSpace
    matrix: np.ndarray

    def block(self, m: int, n: int) -> np.ndarray:
        """The block mapping level n into level m."""
        return self.matrix[self.space.span(m), self.space.span(n)]

    def star(self) -> "LevelOperator":
        return LevelOperator(self.space, self.space.star(self.matrix))

    def __matmul__(self, other):
        if isinstance(other, LevelOperator):
            return LevelOperator(self.space, self.matrix @ other.matrix)
        return self.matrix @ other

    def __add__(self, other: "LevelOperator") -> "LevelOperator":
        return LevelOperator(self.space, self.matrix + other.matrix)

    def __sub__(self, other: "LevelOperator") -> "LevelOperator":
        return LevelOperator(self.space, self.matrix - other.matrix)

    def __mul__(self, s) -> "LevelOperator":
        return LevelOperator(self.space, s * self.matrix)

    __rmul__ = __mul__


@dataclass
class AntilinearLevelOperator:
    """v -> M conj(v) in quotient coordinates."""

    space: TwistedFockSpace
    matrix: np.ndarray

    def __call__(self, v: np.ndarray) -> np.ndarray:
        return self.matrix @ np.conj(v)

    def block(self, m: int, n: int) -> np.ndarray:
        return self.matrix[self.space.span(m), self.space.span(n)]


def build_fock(T, N: int, eps_rank: float = DEFAULT_EPS_RANK,
               tol: float = DEFAULT_TOL) -> TwistedFockSpace:
    T = as_matrix(T, square=True)
    d = local_dim(T)
    levels = []
    for n in range(N + 1):
        w, V = hermitian_spectrum(p_left(T, n))
        if w[0] < -tol * max(1.0, w[-1]):
            raise NotATwistError(f"P_(T,{n}) has negative eigenvalue {w[0]:.3e}")
        keep = w > kernel_threshold(w, eps_rank)
        levels.append(FockLevel(n, V[:, keep], w[keep], V[:, ~keep]))
    return TwistedFockSpace(T, d, N, eps_rank, levels)


def _vec(F: TwistedFockSpace, xi) -> np.ndarray:
    xi = np.asarray(xi, dtype=np.complex128).ravel()
    if xi.shape != (F.d,):
        raise TwistkitError(f"one-particle vector must have length {F.d}")
    return xi


def _require_ybe(F: TwistedFockSpace) -> None:
    ok, res = check_ybe(F.T)
    if not ok:
        raise YBEViolationError(f"right operators need the YBE (residual {res:.3e})")


def _creation(F: TwistedFockSpace, xi, side: str) -> LevelOperator:
    xi = _vec(F, xi)[:, None]
    A = np.zeros((F.total_dim, F.total_dim), dtype=np.complex128)
    for n in range(F.N):
        Qn, Qm = F.levels[n].Q, F.levels[n + 1].Q
        lifted = np.kron(xi, Qn) if side == "left" else np.kron(Qn, xi)
        A[F.span(n + 1), F.span(n)] = dagger(Qm) @ lifted
    return LevelOperator(F, A)


def creation_left(F: TwistedFockSpace, xi) -> LevelOperator:
    """[Psi] -> [xi (x) Psi]."""
    return _creation(F, xi, "left")


def annihilation_left(F: TwistedFockSpace, xi) -> LevelOperator:
    return creation_left(F, xi).star()


def creation_right(F: TwistedFockSpace, xi) -> LevelOperator:
    """[Psi] -> [Psi (x) xi]; well defined on the quotient only under the YBE."""
    _require_ybe(F)
    return _creation(F, xi, "right")


def annihilation_right(F: TwistedFockSpace, xi) -> LevelOperator:
    return creation_right(F, xi).star()


def field(F: TwistedFockSpace, h, side: str = "left") -> LevelOperator:
    """phi(h) = a*(h) + a(h)."""
    if side == "left":
        c = creation_left(F, h)
    elif side == "right":
        c = creation_right(F, h)
    else:
        raise TwistkitError(f"side must be 'left' or 'right', got {side!r}")
    return c + c.star()


def wick_check(F: TwistedFockSpace, q: float, level_cap: int) -> float:
    """
    max over basis xi, eta and twisted-unit quotient vectors v at levels <= level_cap
    of ||(a(xi) a*(eta) - q a*(eta) a(xi) - <xi, eta>) v||_T, for T = qF.
    """
    if level_cap > F.N - 2:
        raise LevelCapError(f"level_cap {level_cap} > N - 2 = {F.N - 2}")
    if op_norm(F.T - q * flip(F.d)) > 1e-12:
        raise TwistkitError("wick_check needs T = qF for the given q")
    basis = np.eye(F.d)
    cre = [creation_left(F, e) for e in basis]
    ann = [c.star() for c in cre]
    one = np.eye(F.total_dim)
    worst = 0.0
    for i, j in itertools.product(range(F.d), repeat=2):
        X = ann[i].matrix @ cre[j].matrix - q * cre[j].matrix @ ann[i].matrix
        X = X - (1.0 if i == j else 0.0) * one
        worst = max(worst, F.restricted_norm(X, level_cap))
    return worst


def adjointness_residual(F: TwistedFockSpace, xi, rng: np.random.Generator, samples: int = 5) -> float:
    """max |<a*(xi) u, v>_T - <u, a(xi) v>_T| for random u, v supported on levels <= N - 1."""
    c = creation_left(F, xi).matrix
    a = F.star(c)
    cut = F.offsets[F.N]
    worst = 0.0
    for _ in range(samples):
        u = np.zeros(F.total_dim, dtype=np.complex128)
        v = np.zeros(F.total_dim, dtype=np.complex128)
        u[:cut] = rng.normal(size=cut) + 1j * rng.normal(size=cut)
        v[:cut] = rng.normal(size=cut) + 1j * rng.normal(size=cut)
        worst = max(worst, abs(F.inner(c @ u, v) - F.inner(u, a @ v)))
    return worst


@dataclass
class ModularFock:
    J: AntilinearLevelOperator
    Dhalf: LevelOperator
    kernel_residual: float


def _reverse(n: int) -> tuple[int, ...]:
    return tuple(n - 1 - k for k in range(n))


def modular_fock(F: TwistedFockSpace, H: StandardSubspace,
                 kernel_tol: float = KERNEL_TOL) -> ModularFock:
    """
    Level n: J_F = J_H^(x)n composed with the reversal of tensor factors, and
    Dhalf_F = (Delta^(1/2))^(x)n, pushed to quotient coordinates.
    """
    ok, res = compatibility(F.T, H)
    if not ok:
        raise CompatibilityError(f"twist is not compatible with the subspace (residual {res:.3e})")
    C = H.J_unitary_part
    Dh = H.delta_sqrt
    Jm = np.zeros((F.total_dim, F.total_dim), dtype=np.complex128)
    Dm = np.zeros_like(Jm)
    worst = 0.0
    Cn = np.ones((1, 1), dtype=np.complex128)
    Dn = np.ones((1, 1), dtype=np.complex128)
    for n, lv in enumerate(F.levels):
        if n > 0:
            Cn = np.kron(Cn, C)
            Dn = np.kron(Dn, Dh)
        M = Cn @ permutation_operator(_reverse(n), F.d) if n > 1 else Cn
        Q, K = lv.Q, lv.K
        if K.shape[1]:
            worst = max(worst, op_norm(dagger(Q) @ M @ np.conj(K)), op_norm(dagger(Q) @ Dn @ K))
        Jm[F.span(n), F.span(n)] = dagger(Q) @ M @ np.conj(Q)
        Dm[F.span(n), F.span(n)] = dagger(Q) @ Dn @ Q
    if worst > kernel_tol:
        raise KernelNotPreservedError(f"modular data do not preserve ker P_(T,n) (residual {worst:.3e})")
    return ModularFock(AntilinearLevelOperator(F, Jm), LevelOperator(F, Dm), worst)


def modular_relation_residual(F: TwistedFockSpace, mod: ModularFock) -> dict:
    """J_F^2 = 1 and J_F Dhalf_F J_F = Dhalf_F^-1 levelwise."""
    J = mod.J.matrix
    D = mod.Dhalf.matrix
    return {
        "J_squared": op_norm(J @ np.conj(J) - np.eye(F.total_dim)),
        "J_Dhalf_J": op_norm(J @ np.conj(D) @ np.conj(J) - np.linalg.inv(D)),
    }


def _words(n_letters: int, max_len: int, min_len: int = 1):
    for k in range(min_len, max_len + 1):
        yield from itertools.product(range(n_letters), repeat=k)


def _apply_word(fields, word, v):
    for i in reversed(word):
        v = fields[i].matrix @ v
    return v


@dataclass
class ModularConsistencyReport:
    passed: bool
    max_residual: float
    worst_word: tuple[int, ...] | None
    max_residual_by_length: dict[int, float]
    word_cap: int
    tol: float

    def to_dict(self) -> dict:
        return {
            "passed": self.passed,
            "max_residual": self.max_residual,
            "worst_word": list(self.worst_word) if self.worst_word is not None else None,
            "max_residual_by_length": {str(k): v for k, v in self.max_residual_by_length.items()},
            "word_cap": self.word_cap,
            "tol": self.tol,
            "scope": "necessary-condition proxy: S A Omega = A* Omega on generator words",
        }


def modular_consistency_test(F: TwistedFockSpace, H: StandardSubspace, word_cap: int,
                             tol: float = 1e-8, mod: ModularFock | None = None) -> ModularConsistencyReport:
    """r(A) = ||J_F Dhalf_F A Omega - A* Omega||_T for words A = phi(h_i1)...phi(h_ik)."""
    if word_cap > F.N:
        raise LevelCapError(f"word_cap {word_cap} > N = {F.N}")
    if mod is None:
        mod = modular_fock(F, H)
    fields = [field(F, h) for h in H.real_basis.T]
    omega = F.vacuum
    worst, worst_word = 0.0, None
    by_len: dict[int, float] = {}
    for word in _words(len(fields), word_cap):
        a_omega = _apply_word(fields, word, omega)
        a_star_omega = _apply_word(fields, word[::-1], omega)
        r = F.norm(mod.J(mod.Dhalf @ a_omega) - a_star_omega)
        by_len[len(word)] = max(by_len.get(len(word), 0.0), r)
        if worst_word is None or r > worst:
            worst, worst_word = r, word
    return ModularConsistencyReport(worst <= tol, worst, worst_word, by_len, word_cap, tol)


def cyclicity_check(F: TwistedFockSpace, H: StandardSubspace, word_cap: int,
                    rtol: float = 1e-8) -> dict:
    """Twisted-Gram rank of {A Omega : words of length <= word_cap} vs the quotient dimension."""
    if word_cap > F.N:
        raise LevelCapError(f"word_cap {word_cap} > N = {F.N}")
    fields = [field(F, h) for h in H.real_basis.T]
    omega = F.vacuum
    cols = [_apply_word(fields, w, omega) for w in _words(len(fields), word_cap, min_len=0)]
    rows = F.upto(word_cap)
    V = np.sqrt(F.gram[rows])[:, None] * np.column_stack(cols)[rows]
    s = np.linalg.svd(V, compute_uv=False)
    rank = int(np.sum(s > rtol * s[0])) if s.size else 0
    expected = F.offsets[word_cap + 1]
    return {"rank": rank, "expected": expected, "full": rank == expected, "word_cap": word_cap}


def commutant_check(F: TwistedFockSpace, H: StandardSubspace, level_cap: int,
                    partner: np.ndarray | None = None) -> float:
    """
    max over h in H, h' in H' (real bases) of ||[phi_L(h), phi_R(h')] v||_T on
    twisted-unit vectors at levels <= level_cap. ``partner`` overrides the
    real basis used for h' (negative controls).
    """
    if level_cap > F.N - 2:
        raise LevelCapError(f"level_cap {level_cap} > N - 2 = {F.N - 2}")
    _require_ybe(F)
    if partner is None:
        partner = symplectic_complement(H).real_basis
    left = [field(F, h, "left").matrix for h in H.real_basis.T]
    right = [field(F, h, "right").matrix for h in np.asarray(partner).T]
    worst = 0.0
    for L in left:
        for R in right:
            worst = max(worst, F.restricted_norm(L @ R - R @ L, level_cap))
    return worst


def fock_summary(F: TwistedFockSpace) -> dict:
    return {
        "d": F.d,
        "N": F.N,
        "eps_rank": F.eps_rank,
        "levels": [
            {"n": lv.n, "tensor_dim": F.d**lv.n, "quotient_dim": lv.dim,
             "kernel_dim": lv.kernel_dim,
             "min_gram": float(lv.gram.min()) if lv.dim else None}
            for lv in F.levels
        ],
        "total_dim": F.total_dim,
    }
