"""
Closed-form S-functions of one rapidity variable: a small expression language,
checks of the defining identities, and discretization of T_S on a uniform
rapidity grid.

Grammar (standard precedence, left associative)::

    expr  := term (('+' | '-') term)*
    term  := unary (('*' | '/') unary)*
    unary := '-' unary | '+' unary | power
    power := atom ('^' ['-'|'+'] INT)?
    atom  := NUMBER | 'i' | 'pi' | VAR | PARAM | FUNC '(' expr ')' | '(' expr ')'

VAR is ``theta``, ``θ`` or ``t``; FUNC is one of sinh, cosh, tanh, exp;
PARAM names are bound to real values at parse time.
"""

from __future__ import annotations

import cmath
import math
import re
from dataclasses import dataclass
from typing import Iterable, Mapping, Sequence, Union

import numpy as np

from .errors import DimensionError, ParseError, PoleError, UnknownIdentifierError

VARIABLES = ("theta", "θ", "t")
FUNCTIONS = {"sinh": cmath.sinh, "cosh": cmath.cosh, "tanh": cmath.tanh, "exp": cmath.exp}
RESERVED = set(VARIABLES) | set(FUNCTIONS) | {"i", "pi"}

POLE_EPS = 1e-300


# -- syntax tree -------------------------------------------------------------

@dataclass(frozen=True)
class Num:
    text: str

    @property
    def value(self) -> float:
        return float(self.text)


@dataclass(frozen=True)
class Imag:
    pass


@dataclass(frozen=True)
class Pi:
    pass


@dataclass(frozen=True)
class Var:
    name: str = "theta"


@dataclass(frozen=True)
class Param:
    name: str
    value: float


@dataclass(frozen=True)
class Neg:
    operand: "SExpr"


@dataclass(frozen=True)
class BinOp:
    op: str
    left: "SExpr"
    right: "SExpr"


@dataclass(frozen=True)
class Pow:
    base: "SExpr"
    exponent: int


@dataclass(frozen=True)
class Call:
    func: str
    arg: "SExpr"


SExpr = Union[Num, Imag, Pi, Var, Param, Neg, BinOp, Pow, Call]


# -- parser ------------------------------------------------------------------

_TOKEN = re.compile(r"""
    (?P<ws>\s+)
  | (?P<num>(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?)
  | (?P<name>[A-Za-z_θ][A-Za-z0-9_θ]*)
  | (?P<op>\*\*|[-+*/^(),])
""", re.VERBOSE)


@dataclass
class _Tok:
    kind: str
    text: str
    pos: int


def _tokenize(text: str) -> list[_Tok]:
    toks = []
    pos = 0
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if m is None:
            raise ParseError(f"unexpected character {text[pos]!r}", pos)
        kind = m.lastgroup
        if kind != "ws":
            tok = m.group()
            toks.append(_Tok("op" if kind == "op" else kind, "^" if tok == "**" else tok, pos))
        pos = m.end()
    toks.append(_Tok("end", "", len(text)))
    return toks


class _Parser:
    def __init__(self, text: str, params: Mapping[str, float]):
        self.toks = _tokenize(text)
        self.i = 0
        self.params = dict(params)
        for name in self.params:
            if name in RESERVED:
                raise ParseError(f"parameter name {name!r} is reserved", 0)

    @property
    def tok(self) -> _Tok:
        return self.toks[self.i]

    def take(self) -> _Tok:
        tok = self.tok
        self.i += 1
        return tok

    def expect(self, text: str) -> None:
        if self.tok.text != text or self.tok.kind != "op":
            found = "end of input" if self.tok.kind == "end" else repr(self.tok.text)
            raise ParseError(f"expected {text!r}, found {found}", self.tok.pos)
        self.i += 1

    def parse(self) -> SExpr:
        node = self.expr()
        if self.tok.kind != "end":
            raise ParseError(f"unexpected {self.tok.text!r}", self.tok.pos)
        return node

    def expr(self) -> SExpr:
        node = self.term()
        while self.tok.kind == "op" and self.tok.text in "+-":
            op = self.take().text
            node = BinOp(op, node, self.term())
        return node

    def term(self) -> SExpr:
        node = self.unary()
        while self.tok.kind == "op" and self.tok.text in "*/":
            op = self.take().text
            node = BinOp(op, node, self.unary())
        return node

    def unary(self) -> SExpr:
        if self.tok.kind == "op" and self.tok.text == "-":
            self.take()
            return Neg(self.unary())
        if self.tok.kind == "op" and self.tok.text == "+":
            self.take()
            return self.unary()
        return self.power()

    def power(self) -> SExpr:
        base = self.atom()
        if self.tok.kind == "op" and self.tok.text == "^":
            self.take()
            sign = 1
            if self.tok.kind == "op" and self.tok.text in "+-":
                sign = -1 if self.take().text == "-" else 1
            tok = self.tok
            if tok.kind != "num" or not tok.text.isdigit():
                raise ParseError("exponent must be an integer literal", tok.pos)
            self.take()
            return Pow(base, sign * int(tok.text))
        return base

    def atom(self) -> SExpr:
        tok = self.tok
        if tok.kind == "num":
            self.take()
            return Num(tok.text)
        if tok.kind == "name":
            self.take()
            name = tok.text
            if name in FUNCTIONS:
                self.expect("(")
                arg = self.expr()
                self.expect(")")
                return Call(name, arg)
            if name == "i":
                return Imag()
            if name == "pi":
                return Pi()
            if name in VARIABLES:
                return Var(name)
            if name in self.params:
                return Param(name, float(self.params[name]))
            raise UnknownIdentifierError(f"unknown identifier {name!r}", tok.pos)
        if tok.kind == "op" and tok.text == "(":
            self.take()
            node = self.expr()
            self.expect(")")
            return node
        found = "end of input" if tok.kind == "end" else repr(tok.text)
        raise ParseError(f"unexpected {found}", tok.pos)


def parse_sexpr(text: str, params: Mapping[str, float] | None = None) -> SExpr:
    return _Parser(text, params or {}).parse()


# -- printer -----------------------------------------------------------------

def _prec(node: SExpr) -> int:
    if isinstance(node, BinOp):
        return 1 if node.op in "+-" else 2
    if isinstance(node, Neg):
        return 3
    if isinstance(node, Pow):
        return 4
    return 5


def to_text(node: SExpr) -> str:
    """Canonical text with the minimal parentheses needed to reparse the same tree."""
    if isinstance(node, Num):
        return node.text
    if isinstance(node, Imag):
        return "i"
    if isinstance(node, Pi):
        return "pi"
    if isinstance(node, (Var, Param)):
        return node.name
    if isinstance(node, Call):
        return f"{node.func}({to_text(node.arg)})"
    if isinstance(node, Neg):
        inner = to_text(node.operand)
        return f"-({inner})" if _prec(node.operand) < 3 else f"-{inner}"
    if isinstance(node, Pow):
        base = to_text(node.base)
        if _prec(node.base) < 5:
            base = f"({base})"
        return f"{base}^{node.exponent}"
    p = _prec(node)
    left = to_text(node.left)
    if _prec(node.left) < p:
        left = f"({left})"
    right = to_text(node.right)
    if _prec(node.right) <= p:
        right = f"({right})"
    sep = f" {node.op} " if node.op in "+-" else node.op
    return f"{left}{sep}{right}"


# -- evaluation --------------------------------------------------------------

def eval_sexpr(node: SExpr, theta: complex) -> complex:
    try:
        value = _eval(node, complex(theta))
    except (OverflowError, ZeroDivisionError) as exc:
        raise PoleError(f"evaluation failed at theta={theta}: {exc}") from exc
    if not cmath.isfinite(value):
        raise PoleError(f"non-finite value at theta={theta}")
    return value


def _eval(node: SExpr, th: complex) -> complex:
    if isinstance(node, Num):
        return complex(node.value)
    if isinstance(node, Imag):
        return 1j
    if isinstance(node, Pi):
        return complex(math.pi)
    if isinstance(node, Var):
        return th
    if isinstance(node, Param):
        return complex(node.value)
    if isinstance(node, Neg):
        return -_eval(node.operand, th)
    if isinstance(node, Call):
        return FUNCTIONS[node.func](_eval(node.arg, th))
    if isinstance(node, Pow):
        base = _eval(node.base, th)
        if node.exponent < 0 and abs(base) < POLE_EPS:
            raise PoleError(f"negative power of zero at theta={th}")
        return base**node.exponent
    a = _eval(node.left, th)
    b = _eval(node.right, th)
    if node.op == "+":
        return a + b
    if node.op == "-":
        return a - b
    if node.op == "*":
        return a * b
    if abs(b) < POLE_EPS:
        raise PoleError(f"division by zero at theta={th}")
    return a / b


# -- matrix-valued S ---------------------------------------------------------

@dataclass(frozen=True)
class MatrixSExpr:
    """S(theta) on V (x) V with dim V = v_dim, entries in row-major pair index."""

    v_dim: int
    entries: tuple[tuple[SExpr, ...], ...]

    def __post_init__(self):
        k = self.v_dim**2
        if len(self.entries) != k or any(len(row) != k for row in self.entries):
            raise DimensionError(f"S-matrix must be {k} x {k} for v_dim={self.v_dim}")

    @classmethod
    def scalar(cls, e: SExpr) -> "MatrixSExpr":
        return cls(1, ((e,),))

    @classmethod
    def parse(cls, v_dim: int, texts: Sequence[Sequence[str]],
              params: Mapping[str, float] | None = None) -> "MatrixSExpr":
        return cls(v_dim, tuple(tuple(parse_sexpr(s, params) for s in row) for row in texts))

    def __call__(self, theta: complex) -> np.ndarray:
        return np.array([[eval_sexpr(e, theta) for e in row] for row in self.entries],
                        dtype=np.complex128)


def as_matrix_sexpr(S) -> MatrixSExpr:
    if isinstance(S, MatrixSExpr):
        return S
    return MatrixSExpr.scalar(S)


@dataclass
class ScalarCheckReport:
    bound_residual: float  # max(|S(theta)| - 1, 0) on real samples
    reflection_residual: float  # |S(-theta) - conj S(theta)|
    crossing_residual: float  # |S(theta + i pi) - conj S(theta)|
    analyticity_residual: float  # finite-difference Cauchy-Riemann proxy
    tol: float
    cr_tol: float

    @property
    def passed(self) -> bool:
        return (self.bound_residual <= self.tol and self.reflection_residual <= self.tol
                and self.crossing_residual <= self.tol and self.analyticity_residual <= self.cr_tol)

    def to_dict(self) -> dict:
        return {
            "passed": self.passed,
            "bound_residual": self.bound_residual,
            "reflection_residual": self.reflection_residual,
            "crossing_residual": self.crossing_residual,
            "analyticity_residual": self.analyticity_residual,
            "tol": self.tol,
            "cr_tol": self.cr_tol,
            "analyticity_note": "finite-difference Cauchy-Riemann evidence on interior strip points, not a proof",
        }


def default_samples(count: int = 50, lo: float = -4.0, hi: float = 4.0) -> np.ndarray:
    return np.linspace(lo, hi, count)


def cauchy_riemann_residual(f, z: complex, step: float = 1e-4) -> float:
    fx = (f(z + step) - f(z - step)) / (2 * step)
    fy = (f(z + 1j * step) - f(z - 1j * step)) / (2 * step)
    return abs(fy - 1j * fx) / max(1.0, abs(fx))


def scalar_s_check(e: SExpr, samples: Iterable[float] | None = None, tol: float = 1e-10,
                   strip_heights: Sequence[float] = (0.25, 0.5, 0.75),
                   cr_step: float = 1e-4, cr_tol: float = 1e-5) -> ScalarCheckReport:
    """
    |S| <= 1, S(-theta) = conj S(theta) = S(theta + i pi) on real samples, plus
    analyticity evidence at theta + i pi * h for the given strip heights.
    """
    xs = default_samples() if samples is None else np.asarray(list(samples), dtype=float)
    f = lambda z: eval_sexpr(e, z)  # noqa: E731
    bound = refl = cross = cr = 0.0
    for x in xs:
        s = f(x)
        bound = max(bound, abs(s) - 1.0)
        refl = max(refl, abs(f(-x) - s.conjugate()))
        cross = max(cross, abs(f(x + 1j * math.pi) - s.conjugate()))
        for h in strip_heights:
            cr = max(cr, cauchy_riemann_residual(f, x + 1j * math.pi * h, cr_step))
    return ScalarCheckReport(max(bound, 0.0), refl, cross, cr, tol, cr_tol)


def ybe_spectral_residual(S, theta: float, theta2: float) -> float:
    S = as_matrix_sexpr(S)
    k = S.v_dim
    one = np.eye(k)

    def s1(x):
        return np.kron(S(x), one)

    def s2(x):
        return np.kron(one, S(x))

    lhs = s1(theta) @ s2(theta + theta2) @ s1(theta2)
    rhs = s2(theta2) @ s1(theta + theta2) @ s2(theta)
    return float(np.linalg.norm(lhs - rhs, 2))


def ybe_spectral_check(S, pairs: Iterable[tuple[float, float]] | None = None,
                       tol: float = 1e-10) -> tuple[bool, float]:
    """max over sample pairs of ||S(a)_1 S(a+b)_2 S(b)_1 - S(b)_2 S(a+b)_1 S(a)_2||."""
    if pairs is None:
        xs = default_samples(7, -3.0, 3.0)
        pairs = [(a, b) for a in xs for b in xs]
    res = max((ybe_spectral_residual(S, a, b) for a, b in pairs), default=0.0)
    return res <= tol, res


def crossing_spectral_check(S, j_unitary_part=None, t_samples: Iterable[float] | None = None,
                            tol: float = 1e-10) -> tuple[bool, float]:
    """
    <v2 (x) v1, S(t + i pi) v3 (x) v4> = <v1 (x) j v4, S(-t) j v2 (x) v3> on the
    matrix-unit basis, with j v = C conj(v).
    """
    S = as_matrix_sexpr(S)
    k = S.v_dim
    C = np.eye(k, dtype=np.complex128) if j_unitary_part is None else np.asarray(j_unitary_part, dtype=np.complex128)
    if C.shape != (k, k):
        raise DimensionError(f"j must act on C^{k}")
    ts = default_samples() if t_samples is None else t_samples
    worst = 0.0
    for t in ts:
        lhs = S(t + 1j * math.pi).reshape(k, k, k, k)  # [v2, v1, v3, v4]
        Sm = S(-t).reshape(k, k, k, k)  # [v1, l, kk, v3]
        # sum_{kk,l} conj(C[l, v4]) C[kk, v2] Sm[v1, l, kk, v3]
        rhs = np.einsum("lf,ka,blkc->abcf", np.conj(C), C, Sm)
        worst = max(worst, float(np.max(np.abs(lhs - rhs))))
    return worst <= tol, worst


@dataclass(frozen=True)
class RapidityGrid:
    theta0: float
    step: float
    count: int

    def __post_init__(self):
        if self.count < 2:
            raise DimensionError(f"grid needs at least 2 points, got {self.count}")
        if not self.step > 0:
            raise DimensionError(f"grid step must be positive, got {self.step}")

    @property
    def points(self) -> np.ndarray:
        return self.theta0 + self.step * np.arange(self.count)


def discretize_TS(S, grid: RapidityGrid) -> np.ndarray:
    """
    T on (C^m (x) C^k)^(x)2 with (T psi)(theta1, theta2) = S(theta2 - theta1) psi(theta2, theta1):
    T (e_{th1,a} (x) e_{th2,b}) = sum_{c,e} S(th1 - th2)_{(c e),(a b)} e_{th2,c} (x) e_{th1,e}.
    One-particle index is (grid index)*k + (V index).
    """
    S = as_matrix_sexpr(S)
    k = S.v_dim
    m = grid.count
    D = m * k
    cache = {}
    for diff in range(-(m - 1), m):
        try:
            cache[diff] = S(diff * grid.step).reshape(k, k, k, k)  # [c, e, a, b]
        except PoleError as exc:
            raise PoleError(f"S has a pole at grid difference {diff * grid.step}") from exc
    T = np.zeros((D * D, D * D), dtype=np.complex128)
    for p1 in range(m):
        for p2 in range(m):
            blk = cache[p1 - p2]
            for a in range(k):
                for b in range(k):
                    col = (p1 * k + a) * D + (p2 * k + b)
                    for c in range(k):
                        for e in range(k):
                            T[(p2 * k + c) * D + (p1 * k + e), col] = blk[c, e, a, b]
    return T
