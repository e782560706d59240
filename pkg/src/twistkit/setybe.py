"""
Set-theoretic Yang-Baxter solutions on X = {0, ..., m-1}.

A solution is stored as a table ``r[x*m + y] = (x', y')``; the derived maps
are ``lam[x][y]`` and ``rho[y][x]`` with ``r(x, y) = (lam_x(y), rho_y(x))``.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Iterator, Sequence

import numpy as np

from .errors import CapExceededError, MalformedTableError

MAX_ENUM_SIZE = 4

Pair = tuple[int, int]


def _apply_r1(r, m, x, y, z):
    a, b = r[x * m + y]
    return a, b, z


def _apply_r2(r, m, x, y, z):
    b, c = r[y * m + z]
    return x, b, c


def check_set_ybe(m: int, r: Sequence[Pair]) -> bool:
    """Exhaustive check of r_1 r_2 r_1 = r_2 r_1 r_2 on all m^3 triples."""
    r = _validate_table(m, r)
    for x, y, z in itertools.product(range(m), repeat=3):
        lhs = _apply_r1(r, m, *_apply_r2(r, m, *_apply_r1(r, m, x, y, z)))
        rhs = _apply_r2(r, m, *_apply_r1(r, m, *_apply_r2(r, m, x, y, z)))
        if lhs != rhs:
            return False
    return True


def _validate_table(m: int, r) -> tuple[Pair, ...]:
    if m < 1:
        raise MalformedTableError(f"set size must be >= 1, got {m}")
    try:
        table = tuple((int(a), int(b)) for a, b in r)
    except (TypeError, ValueError) as exc:
        raise MalformedTableError(f"table entries must be integer pairs: {exc}") from exc
    if len(table) != m * m:
        raise MalformedTableError(f"table has {len(table)} entries, expected {m * m}")
    for a, b in table:
        if not (0 <= a < m and 0 <= b < m):
            raise MalformedTableError(f"table value {(a, b)} outside X = 0..{m - 1}")
    return table


@dataclass(frozen=True)
class SetSolution:
    m: int
    r: tuple[Pair, ...]

    def __post_init__(self):
        object.__setattr__(self, "r", _validate_table(self.m, self.r))
        if not check_set_ybe(self.m, self.r):
            raise MalformedTableError("table does not satisfy the set-theoretic YBE")

    def __call__(self, x: int, y: int) -> Pair:
        return self.r[x * self.m + y]

    @property
    def lam(self) -> list[list[int]]:
        """lam[x][y] = lambda_x(y)."""
        return [[self(x, y)[0] for y in range(self.m)] for x in range(self.m)]

    @property
    def rho(self) -> list[list[int]]:
        """rho[y][x] = rho_y(x)."""
        return [[self(x, y)[1] for x in range(self.m)] for y in range(self.m)]

    @property
    def is_identity(self) -> bool:
        return all(self(x, y) == (x, y) for x in range(self.m) for y in range(self.m))


@dataclass(frozen=True)
class InvolutionJ:
    j: tuple[int, ...]

    def __post_init__(self):
        j = tuple(int(v) for v in self.j)
        m = len(j)
        if any(not 0 <= v < m for v in j) or any(j[j[x]] != x for x in range(m)):
            raise MalformedTableError(f"{j} is not an involution of 0..{m - 1}")
        object.__setattr__(self, "j", j)

    def __call__(self, x: int) -> int:
        return self.j[x]

    @property
    def m(self) -> int:
        return len(self.j)


def is_involutive(sol: SetSolution) -> bool:
    m = sol.m
    return all(sol(*sol(x, y)) == (x, y) for x in range(m) for y in range(m))


def _bijective(f: Sequence[int]) -> bool:
    return sorted(f) == list(range(len(f)))


def is_nondegenerate(sol: SetSolution) -> bool:
    return all(_bijective(row) for row in sol.lam) and all(_bijective(row) for row in sol.rho)


def linearize(sol: SetSolution) -> np.ndarray:
    """0/1 matrix sending x (x) y to lambda_x(y) (x) rho_y(x)."""
    m = sol.m
    T = np.zeros((m * m, m * m), dtype=np.complex128)
    for x in range(m):
        for y in range(m):
            a, b = sol(x, y)
            T[a * m + b, x * m + y] = 1.0
    return T


def permutation_solution(pi: Sequence[int]) -> SetSolution:
    """r(x, y) = (pi(y), pi^-1(x))."""
    pi = tuple(int(v) for v in pi)
    m = len(pi)
    if not _bijective(pi):
        raise MalformedTableError(f"{pi} is not a permutation")
    inv = [0] * m
    for x, v in enumerate(pi):
        inv[v] = x
    return SetSolution(m, tuple((pi[y], inv[x]) for x in range(m) for y in range(m)))


def commuting_maps_solution(f: Sequence[int], g: Sequence[int]) -> SetSolution:
    """
    r(x, y) = (f(y), g(x)) for self-maps with f o g = g o f. Involutive exactly
    when f o g = id; the permutation solutions are the case g = f^-1.
    """
    f = tuple(int(v) for v in f)
    g = tuple(int(v) for v in g)
    m = len(f)
    if len(g) != m:
        raise MalformedTableError("f and g must act on the same set")
    return SetSolution(m, tuple((f[y], g[x]) for x in range(m) for y in range(m)))


def identity_solution(m: int) -> SetSolution:
    return SetSolution(m, tuple((x, y) for x in range(m) for y in range(m)))


def flip_solution(m: int) -> SetSolution:
    return SetSolution(m, tuple((y, x) for x in range(m) for y in range(m)))


def crossing_violations(sol: SetSolution, j: InvolutionJ) -> Iterator[tuple[int, int, int, int]]:
    """Quadruples (x1, x2, x3, x4) where the delta form of crossing symmetry fails."""
    m = sol.m
    if j.m != m:
        raise MalformedTableError(f"involution on {j.m} points, solution on {m}")
    lam, rho = sol.lam, sol.rho
    for x1, x2, x3, x4 in itertools.product(range(m), repeat=4):
        lhs = x2 == lam[x3][x4] and x1 == rho[x4][x3]
        rhs = x1 == lam[j(x2)][x3] and j(x4) == rho[x3][j(x2)]
        if lhs != rhs:
            yield x1, x2, x3, x4


def set_crossing_check(sol: SetSolution, j: InvolutionJ) -> bool:
    return next(crossing_violations(sol, j), None) is None


@dataclass
class PropositionReport:
    crossing: bool
    nondegenerate: bool
    rho_matches: bool  # rho_x == j lam_x^-1 j for every x

    @property
    def holds(self) -> bool:
        return not self.crossing or (self.nondegenerate and self.rho_matches)


def check_proposition(sol: SetSolution, j: InvolutionJ) -> PropositionReport:
    """
    For a crossing-symmetric (r, j): r must be non-degenerate with
    rho_x = j o lam_x^-1 o j. An AssertionError means an implementation bug.
    """
    crossing = set_crossing_check(sol, j)
    nondeg = is_nondegenerate(sol)
    matches = nondeg and all(
        sol.rho[x] == [j(_inverse(sol.lam[x])[j(z)]) for z in range(sol.m)]
        for x in range(sol.m))
    report = PropositionReport(crossing, nondeg, matches)
    if crossing:
        assert report.holds, f"crossing-symmetric solution violates non-degeneracy: {sol.r}"
    return report


def _inverse(f: Sequence[int]) -> list[int]:
    inv = [0] * len(f)
    for x, v in enumerate(f):
        inv[v] = x
    return inv


def all_involutions(m: int) -> Iterator[tuple[int, ...]]:
    """All involutions j of {0..m-1}, lexicographic."""
    for j in itertools.product(range(m), repeat=m):
        if all(j[j[x]] == x for x in range(m)):
            yield j


def _partial_ybe_ok(table: list, m: int) -> bool:
    # r values given as flat indices, None where undecided
    def r(idx):
        return table[idx]

    for x, y, z in itertools.product(range(m), repeat=3):
        lhs = _partial_side(r, m, (x, y, z), (1, 2, 1))
        if lhs is None:
            continue
        rhs = _partial_side(r, m, (x, y, z), (2, 1, 2))
        if rhs is not None and lhs != rhs:
            return False
    return True


def _partial_side(r, m, triple, legs):
    x, y, z = triple
    for leg in legs:
        if leg == 1:
            v = r(x * m + y)
            if v is None:
                return None
            x, y = divmod(v, m)
        else:
            v = r(y * m + z)
            if v is None:
                return None
            y, z = divmod(v, m)
    return x, y, z


def enumerate_involutive(m: int, max_size: int = MAX_ENUM_SIZE) -> list[SetSolution]:
    """
    All involutive set-theoretic solutions on m points, lexicographic in the
    flattened table. Backtracks over involutions of X^2 with YBE pruning on
    partial tables.
    """
    if m > max_size:
        raise CapExceededError(f"set size {m} exceeds enumeration cap {max_size}")
    if m < 1:
        raise MalformedTableError(f"set size must be >= 1, got {m}")
    N = m * m
    table: list = [None] * N
    out = []

    def backtrack(pos):
        while pos < N and table[pos] is not None:
            pos += 1
        if pos == N:
            out.append(SetSolution(m, tuple(divmod(v, m) for v in table)))
            return
        for target in range(pos, N):
            if table[target] is not None:
                continue
            table[pos] = target
            table[target] = pos
            if _partial_ybe_ok(table, m):
                backtrack(pos + 1)
            table[pos] = None
            table[target] = None

    backtrack(0)
    return out
