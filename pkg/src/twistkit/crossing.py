"""
Crossing symmetry of a twist relative to a finite-dimensional standard subspace.

Everything is expanded in an orthonormal eigenbasis u_a of Delta (eigenvalues
d_a). Entry (a, b, c, e) of a table stands for the vectors
psi2 = u_a, psi1 = u_b, psi3 = u_c, psi4 = u_e; the matrix-unit basis suffices
by sesquilinearity. Both sides of the boundary condition are finite sums of
exponentials exp(i mu t), so analyticity and boundedness on the strip hold by
construction and only the boundary identity is compared.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field

import numpy as np

from .errors import CompatibilityError
from .subspace import StandardSubspace, compatibility
from .tensorcore import as_matrix, dagger, hermitian_spectrum

DEFAULT_TOL = 1e-9
FREQ_TOL = 1e-9

Entry = tuple[int, int, int, int]


def group_terms(terms, freq_tol: float = FREQ_TOL) -> list[tuple[float, complex]]:
    """Merge (mu, coefficient) pairs whose frequencies agree within freq_tol."""
    out: list[list] = []
    for mu, c in sorted(terms, key=lambda p: p[0]):
        if out and abs(mu - out[-1][0]) <= freq_tol:
            out[-1][1] += c
        else:
            out.append([mu, complex(c)])
    return [(float(mu), c) for mu, c in out]


@dataclass
class FrequencyTable:
    """Per entry, t -> sum c exp(i mu t). ``basis`` holds the Delta eigenvectors used."""

    d: int
    basis: np.ndarray
    entries: dict[Entry, list[tuple[float, complex]]] = field(default_factory=dict)

    def evaluate(self, t: complex) -> np.ndarray:
        out = np.zeros((self.d,) * 4, dtype=np.complex128)
        for key, terms in self.entries.items():
            out[key] = sum(c * np.exp(1j * mu * t) for mu, c in terms)
        return out


@dataclass
class _Eigendata:
    d: int
    w: np.ndarray
    logw: np.ndarray
    U: np.ndarray
    T4: np.ndarray  # T in the eigenbasis, indexed [a, b, c, e] for <u_a u_b, T u_c u_e>
    C: np.ndarray  # J in the eigenbasis: J u_e = sum_k C[k, e] u_k


def _eigendata(T, H: StandardSubspace, tol: float) -> _Eigendata:
    T = as_matrix(T, square=True)
    ok, res = compatibility(T, H, tol)
    if not ok:
        raise CompatibilityError(f"twist is not compatible with the subspace (residual {res:.3e})")
    w, U = hermitian_spectrum(H.delta)
    d = H.d
    UU = np.kron(U, U)
    Te = dagger(UU) @ T @ UU
    Ce = dagger(U) @ H.J_unitary_part @ np.conj(U)
    return _Eigendata(d, w, np.log(w), U, Te.reshape(d, d, d, d), Ce)


def lhs_table(T, H: StandardSubspace, continued: bool = True,
              tol: float = DEFAULT_TOL) -> FrequencyTable:
    """
    Entry (a,b,c,e) of t -> (Delta^(it) (x) 1) T (1 (x) Delta^(-it)) is
    (d_a/d_e)^(it) T_(ab),(ce); continuing to t + i/2 multiplies it by (d_e/d_a)^(1/2).
    """
    ed = _eigendata(T, H, tol)
    table = FrequencyTable(ed.d, ed.U)
    for a, b, c, e in itertools.product(range(ed.d), repeat=4):
        coef = ed.T4[a, b, c, e]
        if continued:
            coef = coef * np.sqrt(ed.w[e] / ed.w[a])
        table.entries[(a, b, c, e)] = [(float(ed.logw[a] - ed.logw[e]), complex(coef))]
    return table


def lhs_continued(T, H: StandardSubspace, tol: float = DEFAULT_TOL) -> FrequencyTable:
    return lhs_table(T, H, continued=True, tol=tol)


def rhs_boundary(T, H: StandardSubspace, tol: float = DEFAULT_TOL,
                 freq_tol: float = FREQ_TOL) -> FrequencyTable:
    """
    Entry (a,b,c,e) of t -> <u_b (x) J u_e, (1 (x) Delta^(it)) T (Delta^(-it) (x) 1) (J u_a (x) u_c)>
    = sum_{k,l} conj(C_le) C_ka (d_l/d_k)^(it) T_(bl),(kc).
    """
    ed = _eigendata(T, H, tol)
    d = ed.d
    table = FrequencyTable(d, ed.U)
    freq = ed.logw[None, :] - ed.logw[:, None]  # [k, l] -> ln d_l - ln d_k
    for a, e in itertools.product(range(d), repeat=2):
        W = np.outer(ed.C[:, a], np.conj(ed.C[:, e]))  # [k, l]
        for b, c in itertools.product(range(d), repeat=2):
            coefs = W * ed.T4[b, :, :, c].T  # T4[b, l, k, c] -> [k, l]
            terms = [(freq[k, l], coefs[k, l]) for k in range(d) for l in range(d)
                     if coefs[k, l] != 0]
            table.entries[(a, b, c, e)] = group_terms(terms, freq_tol)
    return table


@dataclass
class CrossingReport:
    passed: bool
    max_coefficient_mismatch: float
    max_frequency_mismatch: float
    worst_entry: Entry | None
    tol: float
    freq_tol: float
    analyticity: str = "satisfied by construction (finite sums of exponentials)"

    def to_dict(self) -> dict:
        return {
            "passed": self.passed,
            "max_coefficient_mismatch": self.max_coefficient_mismatch,
            "max_frequency_mismatch": self.max_frequency_mismatch,
            "worst_entry": list(self.worst_entry) if self.worst_entry else None,
            "tol": self.tol,
            "freq_tol": self.freq_tol,
            "analyticity_and_boundedness": self.analyticity,
        }


def compare_terms(left, right, tol: float, freq_tol: float) -> tuple[float, float]:
    """(coefficient mismatch, frequency mismatch) between two grouped term lists."""
    tagged = [(mu, c, 0) for mu, c in left] + [(mu, c, 1) for mu, c in right]
    tagged.sort(key=lambda p: p[0])
    clusters: list[list] = []
    for mu, c, side in tagged:
        if clusters and abs(mu - clusters[-1][0]) <= freq_tol:
            clusters[-1][1][side] += c
            clusters[-1][2][side].append(mu)
        else:
            sums = [0j, 0j]
            sums[side] += c
            mus: list[list[float]] = [[], []]
            mus[side].append(mu)
            clusters.append([mu, sums, mus])
    coef = 0.0
    freq = 0.0
    for _, sums, mus in clusters:
        coef = max(coef, abs(sums[0] - sums[1]))
        if abs(sums[0]) > tol and abs(sums[1]) > tol:
            freq = max(freq, abs(np.mean(mus[0]) - np.mean(mus[1])))
    return coef, freq


def crossing_check(T, H: StandardSubspace, tol: float = DEFAULT_TOL,
                   freq_tol: float = FREQ_TOL) -> CrossingReport:
    """Compare the continued left side with the boundary right side, entry by entry."""
    lhs = lhs_continued(T, H, tol)
    rhs = rhs_boundary(T, H, tol, freq_tol)
    worst, worst_key, worst_freq = 0.0, None, 0.0
    for key in lhs.entries:
        coef, freq = compare_terms(lhs.entries[key], rhs.entries[key], tol, freq_tol)
        worst_freq = max(worst_freq, freq)
        if coef > worst:
            worst, worst_key = coef, key
    passed = worst <= tol and worst_freq <= freq_tol
    return CrossingReport(passed, float(worst), float(worst_freq),
                          worst_key if worst > tol else None, tol, freq_tol)
