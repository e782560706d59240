"""
Quantum symmetrizers by the left and right recursions, and bounded-degree
certification of twist candidates.
"""

from __future__ import annotations

from dataclasses import asdict, dataclass, field

import numpy as np

from .errors import NormBoundError, NotSelfAdjointError
from .tensorcore import (
    MAX_DIM,
    as_matrix,
    check_dim,
    hermitian_spectrum,
    identity,
    leg_embed,
    local_dim,
    op_norm,
    selfadjoint_residual,
)

DEFAULT_TOL = 1e-9
DEFAULT_EPS_RANK = 1e-8
DEFAULT_NMAX = 4


@dataclass(frozen=True)
class Twist:
    """A selfadjoint contraction on C^d (x) C^d with its certification metadata."""

    d: int
    matrix: np.ndarray
    norm: float
    selfadjoint_residual: float
    ybe_residual: float

    @classmethod
    def from_matrix(cls, T, tol: float = DEFAULT_TOL) -> "Twist":
        M = as_matrix(T, square=True)
        d = local_dim(M)
        res = selfadjoint_residual(M)
        if res > tol * max(1.0, op_norm(M)):
            raise NotSelfAdjointError(f"twist candidate is not selfadjoint (residual {res:.3e})")
        norm = op_norm(M)
        if norm > 1 + tol:
            raise NormBoundError(f"twist candidate has norm {norm:.12g} > 1")
        M = 0.5 * (M + M.conj().T)
        M.setflags(write=False)
        return cls(d, M, norm, res, check_ybe(M)[1])


def _matrix(T) -> np.ndarray:
    if isinstance(T, Twist):
        return T.matrix
    return as_matrix(T, square=True)


def p_left(T, n: int, max_dim: int = MAX_DIM) -> np.ndarray:
    """P_{T,n} from P_1 = 1, P_{k+1} = (1 (x) P_k)(1 + T_1 + T_1 T_2 + ... + T_1...T_k)."""
    T = _matrix(T)
    d = local_dim(T)
    check_dim(d**n, max_dim)
    if n == 0:
        return identity(1)
    P = identity(d)
    for k in range(1, n):
        legs = [leg_embed(T, i, k + 1, max_dim) for i in range(1, k + 1)]
        term = identity(d ** (k + 1))
        R = term.copy()
        for L in legs:
            term = term @ L
            R += term
        P = np.kron(identity(d), P) @ R
    return P


def p_right(T, n: int, max_dim: int = MAX_DIM) -> np.ndarray:
    """P_{T,n} from P_1 = 1, P_{k+1} = (P_k (x) 1)(1 + T_k + T_k T_(k-1) + ... + T_k...T_1)."""
    T = _matrix(T)
    d = local_dim(T)
    check_dim(d**n, max_dim)
    if n == 0:
        return identity(1)
    P = identity(d)
    for k in range(1, n):
        legs = [leg_embed(T, i, k + 1, max_dim) for i in range(k, 0, -1)]
        term = identity(d ** (k + 1))
        R = term.copy()
        for L in legs:
            term = term @ L
            R += term
        P = np.kron(P, identity(d)) @ R
    return P


def ybe_residual(T) -> float:
    T = _matrix(T)
    T1 = leg_embed(T, 1, 3)
    T2 = leg_embed(T, 2, 3)
    return op_norm(T1 @ T2 @ T1 - T2 @ T1 @ T2)


def check_ybe(T, tol: float = DEFAULT_TOL) -> tuple[bool, float]:
    """(passed, ||T_1 T_2 T_1 - T_2 T_1 T_2||) on (C^d)^3."""
    res = ybe_residual(T)
    return res <= tol, res


def kernel_threshold(eigenvalues: np.ndarray, eps_rank: float = DEFAULT_EPS_RANK) -> float:
    # floor of 1 so that an exactly vanishing level (e.g. fermions above d) has full kernel
    top = float(np.max(eigenvalues)) if eigenvalues.size else 0.0
    return eps_rank * max(top, 1.0)


@dataclass
class LevelRecord:
    n: int
    min_eigenvalue: float
    max_eigenvalue: float
    kernel_dim: int
    positive: bool
    left_right_difference: float  # ||P_left - P_right||, zero under YBE


@dataclass
class CertificationReport:
    d: int
    n_max: int
    tol: float
    eps_rank: float
    norm: float
    selfadjoint_residual: float
    ybe_residual: float
    levels: list[LevelRecord] = field(default_factory=list)
    is_twist_up_to_nmax: bool = False
    is_strict_up_to_nmax: bool = False
    satisfies_ybe: bool = False
    sufficient_condition_used: str = "none"
    proved_twist_all_n: bool = False
    proved_strict_all_n: bool = False

    @property
    def verdict(self) -> str:
        if self.proved_strict_all_n:
            return "strict twist (proved for all n)"
        if self.proved_twist_all_n:
            kind = "strict up to n_max" if self.is_strict_up_to_nmax else "not strict"
            return f"twist (proved for all n), {kind}"
        if self.is_twist_up_to_nmax:
            kind = "strict" if self.is_strict_up_to_nmax else "not strict"
            return f"twist up to n={self.n_max} ({kind}); no theorem-backed guarantee"
        return f"not a twist (P_n fails positivity for some n <= {self.n_max})"

    def to_dict(self) -> dict:
        out = asdict(self)
        out["verdict"] = self.verdict
        return out


def sufficient_condition(T, norm: float, ybe_ok: bool, tol: float = DEFAULT_TOL) -> tuple[str, bool]:
    """Which general positivity theorem applies, and whether it also gives strictness."""
    if norm <= 0.5 + tol:
        return "small-norm", True
    w, _ = hermitian_spectrum(T)
    if w[0] >= -tol * max(1.0, norm):
        return "positive", True
    if ybe_ok and norm <= 1 + tol:
        return "braided", norm < 1 - tol
    return "none", False


def certify(T, n_max: int = DEFAULT_NMAX, tol: float = DEFAULT_TOL,
            eps_rank: float = DEFAULT_EPS_RANK, max_dim: int = MAX_DIM) -> CertificationReport:
    """
    Bounded-degree twist certification: spectra of P_{T,n} for n <= n_max,
    upgraded to an all-n verdict when a sufficient condition holds.
    """
    M = _matrix(T)
    d = local_dim(M)
    res = selfadjoint_residual(M)
    norm = op_norm(M)
    if res > tol * max(1.0, norm):
        raise NotSelfAdjointError(f"twist candidate is not selfadjoint (residual {res:.3e})")
    if norm > 1 + tol:
        raise NormBoundError(f"twist candidate has norm {norm:.12g} > 1")
    ybe_ok, ybe_res = check_ybe(M, tol)
    report = CertificationReport(d=d, n_max=n_max, tol=tol, eps_rank=eps_rank, norm=norm,
                                 selfadjoint_residual=res, ybe_residual=ybe_res,
                                 satisfies_ybe=ybe_ok)
    for n in range(1, n_max + 1):
        P = p_left(M, n, max_dim)
        w, _ = hermitian_spectrum(P)
        lr = op_norm(P - p_right(M, n, max_dim))
        top = max(float(w[-1]), 1.0)
        positive = bool(w[0] >= -tol * top)
        kdim = int(np.sum(w <= kernel_threshold(w, eps_rank)))
        report.levels.append(LevelRecord(n, float(w[0]), float(w[-1]), kdim, positive, lr))
    report.is_twist_up_to_nmax = all(lv.positive for lv in report.levels)
    report.is_strict_up_to_nmax = report.is_twist_up_to_nmax and all(
        lv.kernel_dim == 0 for lv in report.levels)
    cond, strict = sufficient_condition(M, norm, ybe_ok, tol)
    report.sufficient_condition_used = cond
    report.proved_twist_all_n = cond != "none"
    report.proved_strict_all_n = strict
    return report
