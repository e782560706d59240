from __future__ import annotations

import itertools

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from twistkit.errors import CapExceededError, MalformedTableError
from twistkit.setybe import (
    InvolutionJ,
    SetSolution,
    all_involutions,
    check_proposition,
    check_set_ybe,
    commuting_maps_solution,
    crossing_violations,
    enumerate_involutive,
    flip_solution,
    identity_solution,
    is_involutive,
    is_nondegenerate,
    linearize,
    permutation_solution,
    set_crossing_check,
)
from twistkit.tensorcore import flip
from twistkit.twist import certify, check_ybe


def test_identity_and_flip_are_solutions():
    assert check_set_ybe(3, identity_solution(3).r)
    assert np.allclose(linearize(flip_solution(2)), flip(2))
    assert np.allclose(linearize(identity_solution(2)), np.eye(4))


def test_malformed_tables():
    with pytest.raises(MalformedTableError):
        SetSolution(2, ((0, 0), (0, 1), (1, 0)))
    with pytest.raises(MalformedTableError):
        SetSolution(2, ((0, 0), (0, 2), (1, 0), (1, 1)))
    with pytest.raises(MalformedTableError):
        InvolutionJ((1, 2, 0))


def test_non_ybe_table_rejected():
    table = ((0, 0), (0, 0), (0, 0), (0, 1))
    # r1 r2 r1 (1, 1, 1) = (0, 0, 0) but r2 r1 r2 (1, 1, 1) = (0, 0, 1)
    assert not check_set_ybe(2, table)
    with pytest.raises(MalformedTableError):
        SetSolution(2, table)


# counts frozen from an exhaustive filter of all involutions of X^2 (independent of the pruning)
def brute_force_count(m):
    N = m * m
    count = 0
    for perm in itertools.permutations(range(N)):
        if any(perm[perm[k]] != k for k in range(N)):
            continue
        if check_set_ybe(m, [divmod(v, m) for v in perm]):
            count += 1
    return count


@pytest.mark.parametrize("m,expected", [(1, 1), (2, 3)])
def test_enumeration_counts_small(m, expected):
    assert len(enumerate_involutive(m)) == expected == brute_force_count(m)


def isomorphism_classes(sols):
    """Orbits under relabelling X; 1, 2, 5, 23 non-degenerate involutive classes for m = 1..4."""
    seen = set()
    for s in sols:
        m = s.m
        forms = []
        for p in itertools.permutations(range(m)):
            inv = [0] * m
            for a, b in enumerate(p):
                inv[b] = a
            forms.append(tuple(
                (p[s(inv[x], inv[y])[0]], p[s(inv[x], inv[y])[1]]) for x in range(m) for y in range(m)))
        seen.add(min(forms))
    return len(seen)


def test_enumeration_count_three():
    sols = enumerate_involutive(3)
    assert len(sols) == 19
    assert sum(is_nondegenerate(s) for s in sols) == 12
    assert isomorphism_classes([s for s in sols if is_nondegenerate(s)]) == 5
    assert [list(s.r) for s in sols] == sorted(list(s.r) for s in sols)


@pytest.mark.slow
def test_enumeration_count_four():
    sols = enumerate_involutive(4)
    assert len(sols) == 529
    nondeg = [s for s in sols if is_nondegenerate(s)]
    assert len(nondeg) == 168
    assert isomorphism_classes(nondeg) == 23


def test_enumeration_cap():
    with pytest.raises(CapExceededError):
        enumerate_involutive(5)


def test_permutation_solution_is_nondegenerate_involutive():
    sol = permutation_solution((1, 2, 0))
    assert is_involutive(sol) and is_nondegenerate(sol)


def test_commuting_maps_family():
    sol = commuting_maps_solution((1, 2, 0), (1, 2, 0))
    assert not is_involutive(sol)
    sol = commuting_maps_solution((1, 2, 0), (2, 0, 1))
    assert is_involutive(sol)


@pytest.mark.parametrize("sol", enumerate_involutive(3), ids=lambda s: str(s.r))
def test_linearization_properties_for_enumerated(sol):
    T = linearize(sol)
    assert np.linalg.norm(T - T.conj().T) == 0
    assert check_ybe(T)[0]
    assert np.linalg.norm(T, 2) == pytest.approx(1.0, abs=1e-10)
    rep = certify(T, 3)
    assert rep.is_twist_up_to_nmax
    assert rep.is_strict_up_to_nmax == sol.is_identity


def test_crossing_flip_with_identity_involution():
    assert set_crossing_check(flip_solution(2), InvolutionJ((0, 1)))


def test_identity_solution_fails_crossing_with_witness():
    for j in all_involutions(2):
        bad = next(crossing_violations(identity_solution(2), InvolutionJ(j)), None)
        assert bad is not None


@pytest.mark.parametrize("m", [1, 2, 3])
def test_proposition_exhaustive(m):
    for sol in enumerate_involutive(m):
        for j in all_involutions(m):
            rep = check_proposition(sol, InvolutionJ(j))
            assert rep.holds
            if not rep.nondegenerate:
                assert not rep.crossing


@pytest.mark.parametrize("pi", list(itertools.permutations(range(3))))
@pytest.mark.parametrize("j", list(all_involutions(3)))
def test_permutation_solution_crossing(pi, j):
    # with pi j = j pi the delta identity reduces to pi^-1 = pi
    if any(pi[j[x]] != j[pi[x]] for x in range(3)):
        return
    sol = permutation_solution(pi)
    involutive_pi = all(pi[pi[x]] == x for x in range(3))
    assert set_crossing_check(sol, InvolutionJ(j)) == involutive_pi
    assert check_proposition(sol, InvolutionJ(j)).rho_matches


def test_three_cycle_witness():
    sol = permutation_solution((1, 2, 0))
    bad = next(crossing_violations(sol, InvolutionJ((0, 1, 2))))
    x1, x2, x3, x4 = bad
    lam, rho = sol.lam, sol.rho
    lhs = x2 == lam[x3][x4] and x1 == rho[x4][x3]
    rhs = x1 == lam[x2][x3] and x4 == rho[x3][x2]
    assert lhs != rhs


@settings(max_examples=60, deadline=None)
@given(st.integers(min_value=1, max_value=4).flatmap(
    lambda m: st.tuples(st.permutations(list(range(m))), st.permutations(list(range(m))))))
def test_linearization_selfadjoint_iff_involutive(fg):
    f, g = fg
    fg_comp = [f[g[x]] for x in range(len(f))]
    gf_comp = [g[f[x]] for x in range(len(f))]
    if fg_comp != gf_comp:
        return
    sol = commuting_maps_solution(f, g)
    T = linearize(sol)
    assert (np.linalg.norm(T - T.conj().T) == 0) == is_involutive(sol)
