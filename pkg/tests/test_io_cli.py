from __future__ import annotations

import json
import subprocess
import sys

import numpy as np
import pytest

from conftest import SWAP
from twistkit import REPORT_SCHEMA, __version__, io
from twistkit.cli import run
from twistkit.errors import InputFormatError, MalformedTableError
from twistkit.setybe import flip_solution
from twistkit.subspace import from_modular_pair
from twistkit.tensorcore import flip


@pytest.fixture
def files(tmp_path):
    def write(name, obj):
        p = tmp_path / name
        p.write_text(json.dumps(obj))
        return str(p)

    H = from_modular_pair(SWAP, np.diag([2.0, 0.5]))
    return {
        "flip": write("flip.json", io.twist_to_json(flip(2))),
        "qf": write("qf.json", io.twist_to_json(0.5 * flip(2))),
        "half": write("half.json", io.twist_to_json(0.5 * np.eye(4))),
        "h": write("h.json", io.subspace_to_json(H)),
        "hb": write("hb.json", {"dim": 2, "real_basis": [[[1, 0], [2**0.5, 0]], [[0, 1], [0, -(2**0.5)]]]}),
        "s": write("s.json", {"scalar": "(sinh(t) - i*k)/(sinh(t) + i*k)", "parameters": {"k": 0.5}}),
        "sol": write("sol.json", {"size": 2, "r": [["a", "a"], ["b", "a"], ["a", "b"], ["b", "b"]],
                                  "labels": ["a", "b"]}),
        "j": write("j.json", {"j": [0, 1]}),
        "bad": write("bad.json", {"dim": 2}),
        "tmp": tmp_path,
    }


def report(capsys, argv):
    code = run(argv)
    out = capsys.readouterr().out
    return code, (json.loads(out) if out.strip().startswith("{") else out)


def test_twist_round_trip():
    T = 0.5 * flip(2) + 0.1j * np.eye(4)
    assert np.allclose(io.twist_from_json(io.twist_to_json(T)), T)
    nested = {"dim": 1, "matrix": [[[0.5, 0]]]}
    assert np.allclose(io.twist_from_json(nested), [[0.5]])


def test_subspace_shapes_agree(files):
    A = io.subspace_from_json(io.load_json(files["h"]))
    B = io.subspace_from_json(io.load_json(files["hb"]))
    assert np.allclose(A.delta, B.delta) and np.allclose(A.J_unitary_part, B.J_unitary_part)


def test_solution_labels(files):
    sol, labels = io.solution_from_json(io.load_json(files["sol"]))
    assert sol == flip_solution(2) and labels == ["a", "b"]
    with pytest.raises(MalformedTableError):
        io.solution_from_json({"size": 2, "r": [["a", "c"]] * 4, "labels": ["a", "b"]})


def test_bad_inputs(files):
    with pytest.raises(InputFormatError):
        io.twist_from_json(io.load_json(files["bad"]))
    with pytest.raises(InputFormatError):
        io.load_json(files["tmp"] / "missing.json")


def test_certify_flip(capsys, files):
    code, rep = report(capsys, ["certify-twist", "--input", files["flip"], "--nmax", "4"])
    assert code == 0
    cert = rep["sections"]["certification"]
    assert cert["is_twist_up_to_nmax"] and not cert["is_strict_up_to_nmax"]
    assert rep["schema"] == REPORT_SCHEMA and rep["tool"]["version"] == __version__
    assert rep["parameters"]["n_max"] == 4 and rep["parameters"]["tol"] == 1e-9


def test_enumerate_size_two(capsys):
    code, rep = report(capsys, ["enumerate-solutions", "--size", "2"])
    tables = [s["r"] for s in rep["sections"]["enumeration"]["solutions"]]
    assert code == 0 and len(tables) == 3
    assert [[0, 0], [0, 1], [1, 0], [1, 1]] in tables  # identity
    assert [[0, 0], [1, 0], [0, 1], [1, 1]] in tables  # flip


def test_crossing_exit_codes(capsys, files):
    assert report(capsys, ["check-crossing", "--twist", files["qf"], "--subspace", files["h"]])[0] == 0
    code, rep = report(capsys, ["check-crossing", "--twist", files["half"], "--subspace", files["h"]])
    assert code == 1 and rep["sections"]["crossing"]["worst_entry"] is not None
    code, rep = report(capsys, ["check-crossing", "--solution", files["sol"], "--involution", files["j"]])
    assert code == 0 and rep["sections"]["crossing"]["level"] == "set"


def test_usage_errors(capsys, files):
    assert run(["certify-twist"]) == 2
    assert run(["certify-twist", "--input", files["bad"]]) == 2
    assert run(["enumerate-solutions", "--size", "5"]) == 2
    with pytest.raises(SystemExit) as exc:
        run(["no-such-command"])
    assert exc.value.code == 2
    capsys.readouterr()


def test_smatrix_and_discretize(capsys, files):
    code, rep = report(capsys, ["smatrix-check", "--smatrix", files["s"]])
    assert code == 0 and rep["sections"]["scalar"]["passed"]
    out = str(files["tmp"] / "ts.json")
    code, rep = report(capsys, ["discretize", "--smatrix", files["s"], "--grid-count", "4",
                                "--nmax", "3", "--twist-out", out])
    assert code == 0
    assert rep["parameters"]["grid"] == {"min": -1.5, "step": 1.0, "count": 4}
    T = io.twist_from_json(io.load_json(out))
    assert T.shape == (16, 16)


def test_text_format(capsys, files):
    code, out = report(capsys, ["check-ybe", "--input", files["qf"], "--format", "text"])
    assert code == 0 and out.startswith("check-ybe: PASS")


def test_full_pipeline_sections_and_determinism(capsys, files):
    paths = [str(files["tmp"] / f"r{k}.json") for k in range(2)]
    for p in paths:
        assert run(["full-pipeline", "--twist", files["qf"], "--subspace", files["h"],
                    "--level", "4", "--seed", "42", "--output", p]) == 0
    a, b = (open(p, "rb").read() for p in paths)
    assert a == b
    rep = json.loads(a)
    assert set(rep["sections"]) == {"certification", "ybe", "compatibility", "crossing", "fock",
                                    "modular", "commutant"}


def test_full_pipeline_failure_exit(capsys, files):
    assert run(["full-pipeline", "--twist", files["half"], "--subspace", files["h"]]) == 1
    capsys.readouterr()


def test_console_script_entry():
    proc = subprocess.run([sys.executable, "-m", "twistkit.cli", "--version"], capture_output=True, text=True)
    assert proc.returncode == 0 and __version__ in proc.stdout
