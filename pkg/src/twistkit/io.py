"""JSON file formats. Complex numbers are [re, im] pairs; all indices row-major."""

from __future__ import annotations

import json
from pathlib import Path
from typing import Any

import numpy as np

from .errors import DimensionError, InputFormatError, MalformedTableError
from .setybe import InvolutionJ, SetSolution
from .smatrix import MatrixSExpr, parse_sexpr
from .subspace import StandardSubspace, from_modular_pair, from_real_basis


def load_json(path) -> Any:
    try:
        with open(path, encoding="utf-8") as fh:
            return json.load(fh)
    except OSError as exc:
        raise InputFormatError(f"cannot read {path}: {exc.strerror}") from exc
    except json.JSONDecodeError as exc:
        raise InputFormatError(f"{path}: invalid JSON ({exc})") from exc


def dump_json(obj, path=None) -> str:
    text = json.dumps(obj, indent=2, sort_keys=True, default=_default) + "\n"
    if path is not None:
        Path(path).write_text(text, encoding="utf-8")
    return text


def _default(o):
    if isinstance(o, np.integer):
        return int(o)
    if isinstance(o, np.floating):
        return float(o)
    if isinstance(o, np.bool_):
        return bool(o)
    if isinstance(o, np.ndarray):
        return o.tolist()
    raise TypeError(f"not JSON serializable: {type(o).__name__}")


def _complex(v) -> complex:
    if isinstance(v, (int, float)):
        return complex(v)
    if isinstance(v, (list, tuple)) and len(v) == 2:
        return complex(float(v[0]), float(v[1]))
    raise InputFormatError(f"expected a number or [re, im] pair, got {v!r}")


def _is_entry(v) -> bool:
    return isinstance(v, (int, float)) or (
        isinstance(v, (list, tuple)) and len(v) == 2 and all(isinstance(x, (int, float)) for x in v))


def complex_matrix(rows, shape=None) -> np.ndarray:
    try:
        M = np.array([[_complex(v) for v in row] for row in rows], dtype=np.complex128)
    except TypeError as exc:
        raise InputFormatError(f"matrix must be a list of rows: {exc}") from exc
    if shape is not None and M.shape != shape:
        raise DimensionError(f"matrix has shape {M.shape}, expected {shape}")
    return M


def encode_complex(z) -> list[float]:
    z = complex(z)
    return [float(z.real), float(z.imag)]


def encode_matrix(M) -> list[list[list[float]]]:
    return [[encode_complex(z) for z in row] for row in np.asarray(M)]


# -- twist ---------------------------------------------------------------------

def twist_from_json(obj: dict) -> np.ndarray:
    """{"dim": d, "matrix": [[re, im] x d^4]}; a nested d^2 x d^2 list is accepted too."""
    try:
        d = int(obj["dim"])
        raw = obj["matrix"]
    except (KeyError, TypeError, ValueError) as exc:
        raise InputFormatError(f"twist file needs 'dim' and 'matrix': {exc}") from exc
    D = d * d
    if len(raw) == D * D and all(_is_entry(v) for v in raw):
        flat = np.array([_complex(v) for v in raw], dtype=np.complex128)
        return flat.reshape(D, D)
    return complex_matrix(raw, (D, D))


def twist_to_json(T) -> dict:
    T = np.asarray(T)
    d = int(round(np.sqrt(T.shape[0])))
    return {"dim": d, "matrix": [encode_complex(z) for z in T.ravel()]}


# -- set-theoretic solutions -----------------------------------------------------

def solution_from_json(obj: dict) -> tuple[SetSolution, list[str] | None]:
    try:
        m = int(obj["size"])
        r = obj["r"]
    except (KeyError, TypeError, ValueError) as exc:
        raise InputFormatError(f"solution file needs 'size' and 'r': {exc}") from exc
    labels = obj.get("labels")
    if labels is not None and len(labels) != m:
        raise MalformedTableError(f"{len(labels)} labels for a set of size {m}")
    if labels is not None and r and isinstance(r[0][0], str):
        index = {lab: k for k, lab in enumerate(labels)}
        try:
            r = [[index[a], index[b]] for a, b in r]
        except KeyError as exc:
            raise MalformedTableError(f"unknown label {exc}") from exc
    return SetSolution(m, tuple(tuple(p) for p in r)), labels


def solution_to_json(sol: SetSolution, labels=None) -> dict:
    out = {"size": sol.m, "r": [list(p) for p in sol.r]}
    if labels is not None:
        out["labels"] = list(labels)
    return out


def involution_from_json(obj: dict) -> InvolutionJ:
    try:
        return InvolutionJ(tuple(obj["j"]))
    except (KeyError, TypeError) as exc:
        raise InputFormatError(f"involution file needs 'j': {exc}") from exc


# -- standard subspaces ---------------------------------------------------------

def subspace_from_json(obj: dict) -> StandardSubspace:
    try:
        d = int(obj["dim"])
    except (KeyError, TypeError, ValueError) as exc:
        raise InputFormatError(f"subspace file needs 'dim': {exc}") from exc
    if "real_basis" in obj:
        vecs = [np.array([_complex(v) for v in vec], dtype=np.complex128) for vec in obj["real_basis"]]
        if len(vecs) != d or any(v.shape != (d,) for v in vecs):
            raise DimensionError(f"real_basis must hold {d} vectors of length {d}")
        return from_real_basis(vecs)
    if "J_unitary_part" in obj and "delta" in obj:
        C = complex_matrix(obj["J_unitary_part"], (d, d))
        delta = complex_matrix(obj["delta"], (d, d))
        return from_modular_pair(C, delta)
    raise InputFormatError("subspace file needs 'real_basis' or both 'J_unitary_part' and 'delta'")


def subspace_to_json(H: StandardSubspace) -> dict:
    return {"dim": H.d, "J_unitary_part": encode_matrix(H.J_unitary_part),
            "delta": encode_matrix(H.delta)}


# -- S-matrices -------------------------------------------------------------------

def smatrix_from_json(obj: dict) -> MatrixSExpr:
    params = obj.get("parameters", {}) or {}
    try:
        params = {str(k): float(v) for k, v in params.items()}
    except (AttributeError, TypeError, ValueError) as exc:
        raise InputFormatError(f"'parameters' must map names to reals: {exc}") from exc
    if "scalar" in obj:
        return MatrixSExpr.scalar(parse_sexpr(str(obj["scalar"]), params))
    try:
        k = int(obj["v_dim"])
        entries = obj["entries"]
    except (KeyError, TypeError, ValueError) as exc:
        raise InputFormatError(f"S-matrix file needs 'scalar' or 'v_dim' and 'entries': {exc}") from exc
    return MatrixSExpr.parse(k, entries, params)
