from __future__ import annotations

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import q_symmetrizer_oracle
from twistkit.errors import NormBoundError, NotSelfAdjointError
from twistkit.permgroup import symmetrizer_bruteforce
from twistkit.samples import random_positive_twist, random_selfadjoint_twist
from twistkit.tensorcore import flip
from twistkit.twist import Twist, certify, check_ybe, kernel_threshold, p_left, p_right


def test_p_left_low_degrees():
    T = 0.3 * flip(2)
    assert np.allclose(p_left(T, 0), [[1]])
    assert np.allclose(p_left(T, 1), np.eye(2))
    assert np.allclose(p_left(T, 2), np.eye(4) + T)


# frozen from the q^inv(pi) permutation-sum oracle in conftest
@pytest.mark.parametrize("q,n,expected", [
    (0.5, 2, [0.5, 1.5]),
    (0.5, 3, [0.375, 1.125, 2.625]),
    (-0.5, 3, [0.375, 1.125]),
])
def test_qflip_symmetrizer_spectrum(q, n, expected):
    w = np.linalg.eigvalsh(p_left(q * flip(2), n))
    assert sorted(set(np.round(w, 10))) == pytest.approx(expected, abs=1e-10)
    assert np.allclose(p_left(q * flip(2), n), q_symmetrizer_oracle(q, 2, n))


@settings(max_examples=25, deadline=None)
@given(st.integers(min_value=0, max_value=2**31 - 1), st.integers(min_value=2, max_value=4))
def test_symmetrizer_selfadjoint_for_any_selfadjoint_T(seed, n):
    T = random_selfadjoint_twist(2, np.random.default_rng(seed), norm=1.0)
    P = p_left(T, n)
    assert np.linalg.norm(P - P.conj().T, 2) <= 1e-10


def test_left_right_differ_without_ybe():
    T = random_selfadjoint_twist(2, np.random.default_rng(1), norm=1.0)
    assert np.allclose(p_left(T, 2), p_right(T, 2))
    assert np.linalg.norm(p_left(T, 3) - p_right(T, 3), 2) > 0.1


@pytest.mark.parametrize("q", [-1.0, -0.5, 0.0, 0.5, 1.0])
def test_qflip_left_right_bruteforce(q):
    T = q * flip(2)
    for n in range(1, 5):
        assert np.linalg.norm(p_left(T, n) - p_right(T, n), 2) <= 1e-10
        assert np.linalg.norm(p_left(T, n) - symmetrizer_bruteforce(T, n), 2) <= 1e-10


def test_check_ybe():
    assert check_ybe(flip(2))[0]
    assert check_ybe(0.5 * np.eye(4))[0]
    rng = np.random.default_rng(3)
    ok, res = check_ybe(random_selfadjoint_twist(2, rng))
    assert not ok and res > 1e-3


def test_certify_flip_is_twist_not_strict():
    rep = certify(flip(2), 4)
    assert rep.is_twist_up_to_nmax and not rep.is_strict_up_to_nmax
    assert rep.sufficient_condition_used == "braided"
    assert rep.proved_twist_all_n and not rep.proved_strict_all_n


def test_certify_small_norm_is_strict():
    rep = certify(0.5 * flip(2), 4)
    assert rep.is_strict_up_to_nmax and rep.proved_strict_all_n
    assert rep.sufficient_condition_used == "small-norm"


def test_certify_fermions_have_kernel():
    rep = certify(-flip(2), 4)
    assert [lv.kernel_dim for lv in rep.levels] == [0, 3, 8, 16]


def test_certify_errors():
    with pytest.raises(NotSelfAdjointError):
        certify(np.triu(np.ones((4, 4))), 2)
    with pytest.raises(NormBoundError):
        certify(2 * flip(2), 2)


def test_certify_not_a_twist():
    # a selfadjoint contraction without YBE and beyond the general theorems
    T = random_selfadjoint_twist(2, np.random.default_rng(0), norm=1.0)
    rep = certify(T, 3)
    assert rep.levels[2].min_eigenvalue < -0.5
    assert not rep.is_twist_up_to_nmax and rep.sufficient_condition_used == "none"
    assert rep.verdict.startswith("not a twist")
    assert rep.levels[1].left_right_difference == 0
    assert rep.levels[2].left_right_difference > 0.1


def test_kernel_threshold_floor():
    assert kernel_threshold(np.array([0.0, 0.0]), 1e-8) == 1e-8
    assert kernel_threshold(np.array([0.0, 100.0]), 1e-8) == pytest.approx(1e-6)


def test_twist_from_matrix():
    tw = Twist.from_matrix(0.5 * flip(2))
    assert tw.d == 2 and tw.norm == pytest.approx(0.5) and tw.ybe_residual < 1e-12


@settings(max_examples=20, deadline=None)
@given(st.integers(min_value=0, max_value=2**31 - 1))
def test_random_positive_twists_positive(seed):
    T = random_positive_twist(2, np.random.default_rng(seed))
    rep = certify(T, 3)
    assert rep.is_twist_up_to_nmax and rep.sufficient_condition_used == "positive"
