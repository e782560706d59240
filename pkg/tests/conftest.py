from __future__ import annotations

import itertools

import numpy as np
import pytest

from twistkit.subspace import from_modular_pair

SWAP = np.array([[0, 1], [1, 0]], dtype=complex)


@pytest.fixture
def rng():
    return np.random.default_rng(42)


@pytest.fixture
def h_two():
    """J = swap composed with conjugation, Delta = diag(2, 1/2)."""
    return from_modular_pair(SWAP, np.diag([2.0, 0.5]))


def perm_matrix(p, d):
    """Independent oracle: moves tensor factor k to slot p[k] via index bookkeeping."""
    n = len(p)
    D = d**n
    M = np.zeros((D, D))
    for idx in itertools.product(range(d), repeat=n):
        out = [0] * n
        for k in range(n):
            out[p[k]] = idx[k]
        M[np.ravel_multi_index(out, (d,) * n), np.ravel_multi_index(idx, (d,) * n)] = 1
    return M


def inversion_count(p):
    return sum(1 for i in range(len(p)) for j in range(i + 1, len(p)) if p[i] > p[j])


def q_symmetrizer_oracle(q, d, n):
    """sum over S_n of q^inv(pi) U_pi, which is P_{qF,n}."""
    if n == 0:
        return np.ones((1, 1))
    return sum(q ** inversion_count(p) * perm_matrix(p, d) for p in itertools.permutations(range(n)))


def pytest_terminal_summary(terminalreporter):
    try:
        from test_acceptance import RESULTS
    except ImportError:
        return
    if RESULTS:
        terminalreporter.section("acceptance criteria")
        for line in RESULTS:
            terminalreporter.write_line(line)
