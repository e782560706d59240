"""
Symmetric group combinatorics for the quantum symmetrizer.

Permutations of ``range(n)`` are tuples in one-line notation. Composition is
``(p * q)(x) = p(q(x))`` and the Coxeter generator with letter ``i``
(1 <= i <= n-1) swaps the points ``i-1`` and ``i``. A word ``[i1, ..., il]``
stands for the product ``s_i1 * ... * s_il``.
"""

from __future__ import annotations

import itertools
import math
from typing import Sequence

import numpy as np

from .errors import CapExceededError, DimensionError
from .tensorcore import MAX_DIM, as_matrix, check_dim, identity, leg_embed, local_dim

Perm = tuple[int, ...]

# brute-force symmetrizer sums over n! terms
MAX_DEGREE = 6


def validate(p: Sequence[int]) -> Perm:
    p = tuple(int(x) for x in p)
    if sorted(p) != list(range(len(p))):
        raise DimensionError(f"{p} is not a permutation of range({len(p)})")
    return p


def compose(p: Perm, q: Perm) -> Perm:
    return tuple(p[x] for x in q)


def generator(i: int, n: int) -> Perm:
    if not 1 <= i <= n - 1:
        raise DimensionError(f"generator letter {i} out of range 1..{n - 1}")
    p = list(range(n))
    p[i - 1], p[i] = p[i], p[i - 1]
    return tuple(p)


def word_product(word: Sequence[int], n: int) -> Perm:
    p = tuple(range(n))
    for i in word:
        p = compose(p, generator(i, n))
    return p


def inversions(p: Perm) -> int:
    return sum(1 for a, b in itertools.combinations(p, 2) if a > b)


def reduced_word(p: Sequence[int]) -> list[int]:
    """
    Reduced word by bubble sort of the one-line notation.

    Swapping positions k-1, k of the one-line notation of p is p * s_k, so
    sorting p with swaps s_a1, ..., s_al gives p = s_al * ... * s_a1.
    """
    arr = list(validate(p))
    swaps = []
    n = len(arr)
    for end in range(n - 1, 0, -1):
        for k in range(end):
            if arr[k] > arr[k + 1]:
                arr[k], arr[k + 1] = arr[k + 1], arr[k]
                swaps.append(k + 1)
    return swaps[::-1]


def reduced_word_insertion(p: Sequence[int]) -> list[int]:
    """Second reduced word generator (insertion-sort order), for word-independence tests."""
    arr = list(validate(p))
    swaps = []
    for i in range(1, len(arr)):
        k = i
        while k > 0 and arr[k - 1] > arr[k]:
            arr[k - 1], arr[k] = arr[k], arr[k - 1]
            swaps.append(k)
            k -= 1
    return swaps[::-1]


def rho_T(word: Sequence[int], T, n: int, max_dim: int = MAX_DIM) -> np.ndarray:
    """T_i1 T_i2 ... T_il on (C^d)^n."""
    T = as_matrix(T, square=True)
    d = local_dim(T)
    check_dim(d**n, max_dim)
    out = identity(d**n)
    legs = {}
    for i in word:
        if not 1 <= i <= n - 1:
            raise DimensionError(f"letter {i} out of range 1..{n - 1}")
        if i not in legs:
            legs[i] = leg_embed(T, i, n, max_dim)
        out = out @ legs[i]
    return out


def symmetrizer_bruteforce(T, n: int, max_degree: int = MAX_DEGREE,
                           max_dim: int = MAX_DIM) -> np.ndarray:
    """Sum of rho_T over all n! permutations, each via its bubble-sort reduced word."""
    if n > max_degree:
        raise CapExceededError(f"degree {n} exceeds brute-force cap {max_degree}")
    T = as_matrix(T, square=True)
    d = local_dim(T)
    check_dim(d**n, max_dim)
    legs = {i: leg_embed(T, i, n, max_dim) for i in range(1, n)}
    total = np.zeros((d**n, d**n), dtype=np.complex128)
    for p in itertools.permutations(range(n)):
        term = identity(d**n)
        for i in reduced_word(p):
            term = term @ legs[i]
        total += term
    return total


def permutation_operator(p: Perm, d: int) -> np.ndarray:
    """
    Unitary on (C^d)^n moving tensor factor k to position p(k):
    e_x0 (x) ... (x) e_x(n-1)  ->  e_y0 (x) ... with y_p(k) = x_k.
    """
    n = len(p)
    dim = d**n
    M = np.zeros((dim, dim), dtype=np.complex128)
    for idx, xs in enumerate(itertools.product(range(d), repeat=n)):
        ys = [0] * n
        for k in range(n):
            ys[p[k]] = xs[k]
        M[int(np.ravel_multi_index(ys, (d,) * n)), idx] = 1.0
    return M


def symmetric_projection(d: int, n: int, sign: int = 1) -> np.ndarray:
    """Average of all (signed) permutation operators: Bose (sign=1) or Fermi (sign=-1)."""
    dim = d**n
    total = np.zeros((dim, dim), dtype=np.complex128)
    for p in itertools.permutations(range(n)):
        s = 1 if sign == 1 else (-1) ** inversions(p)
        total += s * permutation_operator(p, d)
    return total / math.factorial(n)
