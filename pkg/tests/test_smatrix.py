from __future__ import annotations

import cmath
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from twistkit.errors import DimensionError, ParseError, PoleError, UnknownIdentifierError
from twistkit.smatrix import (
    BinOp,
    Call,
    Imag,
    MatrixSExpr,
    Neg,
    Num,
    Pi,
    Pow,
    RapidityGrid,
    Var,
    crossing_spectral_check,
    discretize_TS,
    eval_sexpr,
    parse_sexpr,
    scalar_s_check,
    to_text,
    ybe_spectral_check,
)
from twistkit.tensorcore import flip
from twistkit.twist import certify, check_ybe

SINH_FAMILY = "(sinh(t) - i*k)/(sinh(t) + i*k)"


def sinh_family(k=0.5):
    return parse_sexpr(SINH_FAMILY, {"k": k})


def yang_matrix():
    """S(theta) = (theta F - i pi 1)/(theta - i pi) on C^2 (x) C^2."""
    F = flip(2).real
    rows = [[f"(t*{F[r, c]:g} - i*pi*{1 if r == c else 0})/(t - i*pi)" for c in range(4)]
            for r in range(4)]
    return MatrixSExpr.parse(2, rows)


def test_parse_constant():
    e = parse_sexpr("1")
    assert e == Num("1") and eval_sexpr(e, 0.3 + 2j) == 1


def test_sinh_family_at_zero():
    assert eval_sexpr(sinh_family(), 0) == pytest.approx(-1)
    assert abs(eval_sexpr(sinh_family(), 1.0)) == pytest.approx(1, abs=1e-14)


def test_precedence():
    assert eval_sexpr(parse_sexpr("1 + 2*3^2"), 0) == 19
    assert eval_sexpr(parse_sexpr("-2^2"), 0) == -4
    assert eval_sexpr(parse_sexpr("(-2)^2"), 0) == 4
    assert eval_sexpr(parse_sexpr("8/4/2"), 0) == 1
    assert eval_sexpr(parse_sexpr("2^-1"), 0) == 0.5
    assert eval_sexpr(parse_sexpr("theta - θ + t"), 2) == 2


@pytest.mark.parametrize("text,pos", [("sinh(", 5), ("1 +", 3), ("(1", 2), ("2 $ 3", 2), ("t^1.5", 2)])
def test_syntax_errors_carry_position(text, pos):
    with pytest.raises(ParseError) as exc:
        parse_sexpr(text)
    assert exc.value.position == pos


def test_unknown_identifier():
    with pytest.raises(UnknownIdentifierError) as exc:
        parse_sexpr("1 + kappa")
    assert exc.value.position == 4


def test_sinh_i_pi():
    assert abs(eval_sexpr(parse_sexpr("sinh(t)"), 1j * math.pi)) <= 1e-12


def test_pole():
    with pytest.raises(PoleError):
        eval_sexpr(parse_sexpr("1/t"), 0)
    with pytest.raises(PoleError):
        eval_sexpr(parse_sexpr("exp(exp(t))"), 10)


def test_scalar_checks():
    assert scalar_s_check(parse_sexpr("1")).passed
    assert not scalar_s_check(parse_sexpr("i")).passed
    rep = scalar_s_check(sinh_family())
    assert rep.passed
    assert max(rep.bound_residual, rep.reflection_residual, rep.crossing_residual) <= 1e-10
    assert rep.analyticity_residual <= 1e-5


def test_even_real_function_reflection():
    # real on the real line and even, so S(-t) = conj S(t)
    rep = scalar_s_check(parse_sexpr("(sinh(t)*sinh(t) - 1)/(sinh(t)*sinh(t) + 1)"))
    assert rep.reflection_residual <= 1e-12


def test_ybe_spectral():
    assert ybe_spectral_check(sinh_family())[1] <= 1e-14
    ident = MatrixSExpr.parse(2, [["1" if r == c else "0" for c in range(4)] for r in range(4)])
    assert ybe_spectral_check(ident)[1] == 0
    assert ybe_spectral_check(yang_matrix())[0]


def test_crossing_spectral():
    assert crossing_spectral_check(sinh_family())[0]
    assert crossing_spectral_check(MatrixSExpr.scalar(parse_sexpr("1")))[0]
    assert not crossing_spectral_check(MatrixSExpr.scalar(parse_sexpr("tanh(t)")))[0]


def test_grid_validation():
    with pytest.raises(DimensionError):
        RapidityGrid(0.0, 1.0, 1)
    with pytest.raises(DimensionError):
        RapidityGrid(0.0, 0.0, 3)


@pytest.mark.parametrize("text,sign", [("1", 1), ("-1", -1)])
def test_discretize_constants_give_flip(text, sign):
    T = discretize_TS(parse_sexpr(text), RapidityGrid(0.0, 1.0, 3))
    assert np.allclose(T, sign * flip(3))


def test_discretize_sinh_family():
    T = discretize_TS(sinh_family(), RapidityGrid(-1.5, 1.0, 4))
    assert np.linalg.norm(T - T.conj().T) <= 1e-10
    assert np.linalg.norm(T @ T.conj().T - np.eye(16)) <= 1e-10
    assert check_ybe(T)[0]
    assert certify(T, 3).is_twist_up_to_nmax


def test_discretize_matrix_solution_keeps_ybe():
    T = discretize_TS(yang_matrix(), RapidityGrid(0.0, 0.7, 3))
    assert np.linalg.norm(T - T.conj().T) <= 1e-10
    assert check_ybe(T)[0]


def test_discretize_pole():
    with pytest.raises(PoleError):
        discretize_TS(parse_sexpr("1/t"), RapidityGrid(0.0, 1.0, 2))


# -- expression trees for round-trip and conjugation properties -----------------

atoms = st.one_of(
    st.sampled_from(["0.5", "1", "2", "3.25", "1e-3"]).map(Num),
    st.just(Imag()), st.just(Pi()), st.just(Var("t")),
)
real_atoms = st.one_of(st.sampled_from(["0.5", "1", "2", "3.25"]).map(Num), st.just(Pi()),
                       st.just(Var("t")))


def trees(leaves):
    return st.recursive(leaves, lambda sub: st.one_of(
        st.builds(BinOp, st.sampled_from("+-*/"), sub, sub),
        st.builds(Neg, sub),
        st.builds(Pow, sub, st.integers(min_value=-2, max_value=3)),
        st.builds(Call, st.sampled_from(["sinh", "cosh", "tanh", "exp"]), sub),
    ), max_leaves=8)


@settings(max_examples=200, deadline=None)
@given(trees(atoms))
def test_print_parse_round_trip(tree):
    text = to_text(tree)
    assert parse_sexpr(text) == tree
    assert to_text(parse_sexpr(text)) == text


@settings(max_examples=150, deadline=None)
@given(trees(real_atoms), st.complex_numbers(max_magnitude=2, allow_nan=False, allow_infinity=False))
def test_conjugate_point_symmetry(tree, z):
    try:
        a = eval_sexpr(tree, z)
        b = eval_sexpr(tree, z.conjugate())
    except PoleError:
        return
    if abs(a) > 1e8:
        return
    assert cmath.isclose(b, a.conjugate(), rel_tol=1e-9, abs_tol=1e-9)


CORPUS = [
    "1", "t", "-t", "i*pi", "sinh(t)", "cosh(t)^2 - sinh(t)^2", "exp(i*t)",
    SINH_FAMILY.replace("k", "0.5"), "(t - i*pi)/(t + i*pi)", "tanh(t/2)", "2^-3",
    "-(1 + t)", "1 - (2 - 3)", "1/(2/3)", "(1/2)/3", "(-1)^3", "--t", "exp(-t^2)",
    "sinh(t + i*pi)", "cosh(i*pi/2)", "t*t*t", "1 + 2 + 3", "1 - 2 - 3", "(t^2)^2",
    "-t^2", "(-t)^2", "sinh(sinh(t))", "i", "pi/4", "3.5e2*t",
]


@pytest.mark.parametrize("text", CORPUS)
def test_corpus_idempotent(text):
    once = parse_sexpr(text)
    assert parse_sexpr(to_text(once)) == once
