"""Command-line entry point: ``twistkit <subcommand> [options]``.

Every subcommand writes one report (schema twistkit-report-v1) and exits with
0 when all checks pass, 1 when a check fails and 2 on usage or input errors.
"""

from __future__ import annotations

import argparse
import hashlib
import sys
from pathlib import Path

import numpy as np

from . import REPORT_SCHEMA, __version__
from . import crossing, fock, io, setybe, smatrix, subspace, twist
from .errors import TwistkitError
from .tensorcore import dagger, flip, local_dim, op_norm

DEFAULTS = {"tol": 1e-9, "eps_rank": 1e-8, "nmax": 4, "level": 4, "word_cap": 3, "seed": 42}
SIG_DIGITS = 12


class UsageError(TwistkitError):
    pass


# -- report plumbing ---------------------------------------------------------------

def _clean(obj):
    """JSON-ready copy with floats rounded to SIG_DIGITS significant digits."""
    if isinstance(obj, dict):
        return {str(k): _clean(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_clean(v) for v in obj]
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        x = float(obj)
        return float(f"{x:.{SIG_DIGITS}g}") if np.isfinite(x) else str(x)
    if isinstance(obj, complex):
        return io.encode_complex(obj)
    return obj


def _digest(path: str) -> str:
    return hashlib.sha256(Path(path).read_bytes()).hexdigest()


def _parameters(args) -> dict:
    params = {
        "tol": args.tol,
        "eps_rank": args.eps_rank,
        "n_max": args.nmax,
        "N": args.level,
        "word_cap": args.word_cap,
        "seed": args.seed,
    }
    if getattr(args, "grid_count", None) is not None:
        params["grid"] = {"min": args.grid_min, "step": args.grid_step, "count": args.grid_count}
    return params


def build_report(args, passed: bool, sections: dict, inputs: dict) -> dict:
    return _clean({
        "schema": REPORT_SCHEMA,
        "tool": {"name": "twistkit", "version": __version__},
        "command": args.command,
        "parameters": _parameters(args),
        "inputs": {k: {"path": v, "sha256": _digest(v)} for k, v in sorted(inputs.items()) if v},
        "passed": bool(passed),
        "sections": sections,
    })


def _flatten(obj, prefix=""):
    if isinstance(obj, dict):
        for k, v in obj.items():
            yield from _flatten(v, f"{prefix}{k}.")
    elif isinstance(obj, list) and obj and all(isinstance(v, dict) for v in obj):
        for i, v in enumerate(obj):
            yield from _flatten(v, f"{prefix}{i}.")
    else:
        yield prefix[:-1], obj


def render_text(report: dict) -> str:
    lines = [f"{report['command']}: {'PASS' if report['passed'] else 'FAIL'}"]
    lines += [f"  {k} = {v}" for k, v in _flatten(report["sections"])]
    lines.append(f"  [{report['schema']}, twistkit {report['tool']['version']}]")
    return "\n".join(lines) + "\n"


def emit(report: dict, args) -> None:
    text = io.dump_json(report) if args.format == "json" else render_text(report)
    if args.output:
        Path(args.output).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)


# -- section builders ---------------------------------------------------------------

def _need(args, name: str) -> str:
    value = getattr(args, name, None)
    if not value:
        raise UsageError(f"--{name.replace('_', '-')} is required for {args.command}")
    return value


def _load_twist(path: str) -> np.ndarray:
    return io.twist_from_json(io.load_json(path))


def _load_subspace(path: str) -> subspace.StandardSubspace:
    return io.subspace_from_json(io.load_json(path))


def certify_section(T, args) -> tuple[bool, dict]:
    rep = twist.certify(T, args.nmax, args.tol, args.eps_rank)
    return rep.is_twist_up_to_nmax, rep.to_dict()


def ybe_section(T, args) -> tuple[bool, dict]:
    ok, res = twist.check_ybe(T, args.tol)
    return ok, {"passed": ok, "residual": res, "tol": args.tol}


def compatibility_section(T, H, args) -> tuple[bool, dict]:
    ok, res = subspace.compatibility(T, H, args.tol)
    return ok, {"passed": ok, "residual": res, "tol": args.tol}


def crossing_section(T, H, args) -> tuple[bool, dict]:
    rep = crossing.crossing_check(T, H, args.tol)
    return rep.passed, rep.to_dict()


def flip_coefficient(T) -> float | None:
    """q when T = qF (within 1e-12), else None."""
    F = flip(local_dim(T))
    q = float(np.real(np.vdot(F, T)) / np.vdot(F, F).real)
    return q if op_norm(T - q * F) <= 1e-12 else None


def fock_section(T, args) -> tuple[bool, dict]:
    F = fock.build_fock(T, args.level, args.eps_rank, args.tol)
    out = fock.fock_summary(F)
    rng = np.random.default_rng(args.seed)
    adj = max(fock.adjointness_residual(F, e, rng) for e in np.eye(F.d))
    out["adjointness_residual"] = adj
    passed = adj <= 1e-8
    q = flip_coefficient(T)
    if q is not None and args.level >= 2:
        res = fock.wick_check(F, q, args.level - 2)
        out["wick"] = {"q": q, "residual": res, "level_cap": args.level - 2, "passed": res <= args.tol}
        passed = passed and res <= args.tol
    out["passed"] = passed
    return passed, out


def modular_section(T, H, args) -> tuple[bool, dict]:
    F = fock.build_fock(T, args.level, args.eps_rank, args.tol)
    mod = fock.modular_fock(F, H)
    rep = fock.modular_consistency_test(F, H, args.word_cap, mod=mod)
    out = rep.to_dict()
    rel = fock.modular_relation_residual(F, mod)
    out["modular_relations"] = rel
    out["kernel_residual"] = mod.kernel_residual
    out["cyclicity"] = fock.cyclicity_check(F, H, args.word_cap)
    rel_ok = all(v <= 1e-8 for v in rel.values())
    out["passed"] = rep.passed and rel_ok
    return out["passed"], out


def commutant_section(T, H, args) -> tuple[bool, dict]:
    F = fock.build_fock(T, args.level, args.eps_rank, args.tol)
    cap = args.level - 2
    res = fock.commutant_check(F, H, cap)
    ok = res <= 1e-8
    return ok, {"passed": ok, "residual": res, "level_cap": cap, "tol": 1e-8}


# -- subcommands ---------------------------------------------------------------------

def cmd_certify_twist(args):
    path = _need(args, "input")
    passed, sec = certify_section(_load_twist(path), args)
    return passed, {"certification": sec}, {"twist": path}


def cmd_check_ybe(args):
    path = _need(args, "input")
    passed, sec = ybe_section(_load_twist(path), args)
    return passed, {"ybe": sec}, {"twist": path}


def cmd_linearize(args):
    path = _need(args, "input")
    sol, labels = io.solution_from_json(io.load_json(path))
    T = setybe.linearize(sol)
    sec = {
        "size": sol.m,
        "involutive": setybe.is_involutive(sol),
        "nondegenerate": setybe.is_nondegenerate(sol),
        "selfadjoint_residual": op_norm(T - dagger(T)),
        "twist": io.twist_to_json(T),
    }
    if labels is not None:
        sec["labels"] = labels
    return True, {"linearization": sec}, {"solution": path}


def cmd_check_crossing(args):
    if args.solution:
        inv = _need(args, "involution")
        sol, _ = io.solution_from_json(io.load_json(args.solution))
        j = io.involution_from_json(io.load_json(inv))
        bad = next(setybe.crossing_violations(sol, j), None)
        prop = setybe.check_proposition(sol, j)
        sec = {"passed": bad is None, "level": "set", "violating_quadruple": bad,
               "nondegenerate": prop.nondegenerate, "rho_matches_j_lam_inverse_j": prop.rho_matches}
        return bad is None, {"crossing": sec}, {"solution": args.solution, "involution": inv}
    tpath, hpath = _need(args, "twist"), _need(args, "subspace")
    T, H = _load_twist(tpath), _load_subspace(hpath)
    ok, comp = compatibility_section(T, H, args)
    if not ok:
        return False, {"compatibility": comp, "crossing": {"passed": False, "skipped": "incompatible"}}, \
            {"twist": tpath, "subspace": hpath}
    passed, sec = crossing_section(T, H, args)
    return passed, {"compatibility": comp, "crossing": sec}, {"twist": tpath, "subspace": hpath}


def cmd_check_compatibility(args):
    tpath, hpath = _need(args, "twist"), _need(args, "subspace")
    passed, sec = compatibility_section(_load_twist(tpath), _load_subspace(hpath), args)
    return passed, {"compatibility": sec}, {"twist": tpath, "subspace": hpath}


def cmd_enumerate_solutions(args):
    if args.size is None:
        raise UsageError("--size is required for enumerate-solutions")
    sols = setybe.enumerate_involutive(args.size)
    rows = [{"r": [list(p) for p in s.r], "nondegenerate": setybe.is_nondegenerate(s),
             "identity": s.is_identity} for s in sols]
    sec = {"size": args.size, "count": len(sols),
           "nondegenerate_count": sum(r["nondegenerate"] for r in rows), "solutions": rows}
    return True, {"enumeration": sec}, {}


def cmd_fock_report(args):
    path = _need(args, "twist") if args.twist else _need(args, "input")
    passed, sec = fock_section(_load_twist(path), args)
    return passed, {"fock": sec}, {"twist": path}


def cmd_modular_test(args):
    tpath, hpath = _need(args, "twist"), _need(args, "subspace")
    passed, sec = modular_section(_load_twist(tpath), _load_subspace(hpath), args)
    return passed, {"modular": sec}, {"twist": tpath, "subspace": hpath}


def cmd_commutant_test(args):
    tpath, hpath = _need(args, "twist"), _need(args, "subspace")
    passed, sec = commutant_section(_load_twist(tpath), _load_subspace(hpath), args)
    return passed, {"commutant": sec}, {"twist": tpath, "subspace": hpath}


def _load_j(args, k: int):
    if not args.j_unitary:
        return np.eye(k, dtype=np.complex128)
    obj = io.load_json(args.j_unitary)
    return io.complex_matrix(obj["J_unitary_part"] if isinstance(obj, dict) else obj, (k, k))


def cmd_smatrix_check(args):
    path = _need(args, "smatrix")
    S = io.smatrix_from_json(io.load_json(path))
    sections = {}
    passed = True
    if S.v_dim == 1:
        rep = smatrix.scalar_s_check(S.entries[0][0], tol=args.tol)
        sections["scalar"] = rep.to_dict()
        passed = rep.passed
    ok, res = smatrix.ybe_spectral_check(S, tol=args.tol)
    sections["ybe_spectral"] = {"passed": ok, "residual": res}
    ok2, res2 = smatrix.crossing_spectral_check(S, _load_j(args, S.v_dim), tol=args.tol)
    sections["crossing_spectral"] = {"passed": ok2, "residual": res2}
    inputs = {"smatrix": path, "j": args.j_unitary}
    return passed and ok and ok2, sections, inputs


def cmd_discretize(args):
    path = _need(args, "smatrix")
    S = io.smatrix_from_json(io.load_json(path))
    grid = smatrix.RapidityGrid(args.grid_min, args.grid_step, args.grid_count)
    T = smatrix.discretize_TS(S, grid)
    sa = op_norm(T - dagger(T))
    unit = op_norm(T @ dagger(T) - np.eye(T.shape[0]))
    sec = {"one_particle_dim": grid.count * S.v_dim, "selfadjoint_residual": sa,
           "unitarity_residual": unit}
    ok_ybe, ybe_sec = ybe_section(T, args)
    sec["ybe"] = ybe_sec
    passed = sa <= 1e-10 and ok_ybe
    if sa <= args.tol:
        ok_cert, cert = certify_section(T, args)
        sec["certification"] = cert
        passed = passed and ok_cert
    if args.twist_out:
        io.dump_json(io.twist_to_json(T), args.twist_out)
    return passed, {"discretization": sec}, {"smatrix": path}


def cmd_full_pipeline(args):
    tpath, hpath = _need(args, "twist"), _need(args, "subspace")
    T, H = _load_twist(tpath), _load_subspace(hpath)
    sections = {}
    results = []
    ok, sections["certification"] = certify_section(T, args)
    results.append(ok)
    ybe_ok, sections["ybe"] = ybe_section(T, args)
    results.append(ybe_ok)
    comp_ok, sections["compatibility"] = compatibility_section(T, H, args)
    results.append(comp_ok)
    fock_ok, sections["fock"] = fock_section(T, args)
    results.append(fock_ok)
    if comp_ok:
        for name, fn in (("crossing", crossing_section), ("modular", modular_section)):
            ok, sections[name] = fn(T, H, args)
            results.append(ok)
    else:
        for name in ("crossing", "modular"):
            sections[name] = {"passed": False, "skipped": "twist not compatible with subspace"}
            results.append(False)
    if comp_ok and ybe_ok:
        ok, sections["commutant"] = commutant_section(T, H, args)
    else:
        ok, sections["commutant"] = False, {"passed": False,
                                            "skipped": "needs YBE and compatibility"}
    results.append(ok)
    return all(results), sections, {"twist": tpath, "subspace": hpath}


COMMANDS = {
    "certify-twist": cmd_certify_twist,
    "check-ybe": cmd_check_ybe,
    "linearize": cmd_linearize,
    "check-crossing": cmd_check_crossing,
    "check-compatibility": cmd_check_compatibility,
    "enumerate-solutions": cmd_enumerate_solutions,
    "fock-report": cmd_fock_report,
    "modular-test": cmd_modular_test,
    "commutant-test": cmd_commutant_test,
    "smatrix-check": cmd_smatrix_check,
    "discretize": cmd_discretize,
    "full-pipeline": cmd_full_pipeline,
}


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--tol", type=float, default=DEFAULTS["tol"])
    common.add_argument("--eps-rank", type=float, default=DEFAULTS["eps_rank"])
    common.add_argument("--nmax", type=int, default=DEFAULTS["nmax"], help="certification degree")
    common.add_argument("--level", type=int, default=DEFAULTS["level"], help="Fock truncation N")
    common.add_argument("--word-cap", type=int, default=DEFAULTS["word_cap"])
    common.add_argument("--seed", type=int, default=DEFAULTS["seed"])
    common.add_argument("--output", help="write the report here instead of stdout")
    common.add_argument("--format", choices=("json", "text"), default="json")

    parser = argparse.ArgumentParser(prog="twistkit", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"twistkit {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        p = sub.add_parser(name, parents=[common])
        if name in ("certify-twist", "check-ybe", "linearize", "fock-report"):
            p.add_argument("--input", help="twist file (solution file for linearize)")
        if name in ("check-crossing", "check-compatibility", "fock-report", "modular-test",
                    "commutant-test", "full-pipeline"):
            p.add_argument("--twist", help="twist file")
        if name in ("check-crossing", "check-compatibility", "modular-test", "commutant-test",
                    "full-pipeline"):
            p.add_argument("--subspace", help="standard subspace file")
        if name == "check-crossing":
            p.add_argument("--solution", help="set-theoretic solution file (delta-level check)")
            p.add_argument("--involution", help="involution file for --solution")
        if name == "enumerate-solutions":
            p.add_argument("--size", type=int, help="set size m (at most 4)")
        if name in ("smatrix-check", "discretize"):
            p.add_argument("--smatrix", help="S-matrix file")
        if name == "smatrix-check":
            p.add_argument("--j-unitary", help="JSON matrix C with j v = C conj(v) (default identity)")
        if name == "discretize":
            p.add_argument("--grid-min", type=float, default=-1.5)
            p.add_argument("--grid-step", type=float, default=1.0)
            p.add_argument("--grid-count", type=int, default=4)
            p.add_argument("--twist-out", help="also write the discretized twist file here")
    return parser


def run(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        passed, sections, inputs = COMMANDS[args.command](args)
        emit(build_report(args, passed, sections, inputs), args)
    except (TwistkitError, OSError) as exc:
        print(f"twistkit {args.command}: error: {exc}", file=sys.stderr)
        return 2
    return 0 if passed else 1


def main(argv=None) -> None:
    sys.exit(run(argv))


if __name__ == "__main__":
    main()
