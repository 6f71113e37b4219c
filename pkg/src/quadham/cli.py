"""Command-line front end: ``quadham <command> --model FILE [options]``.

Every command writes a JSON report (``report.json`` under ``--out``, or
stdout when ``--out`` is omitted). ``simulate`` and ``lagrange-check`` also
write ``trajectory.csv``. Exit status is 0 when all checks pass, 1 when a
check fails and 2 on malformed input.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
from pathlib import Path

import numpy as np

from .constraints import ConstraintSet, InvalidConstraintError, classify_constraints, constraint_algorithm
from .dynamics import (
    DivergenceError,
    NotApplicableError,
    constrained_equation_check,
    constraint_drift,
    integrate_hamilton,
    lagrange_residual,
    split_residuals,
)
from .hamiltonian import InvalidFrameError, build_hamiltonian, check_association
from .koszul_tate import (
    KTComplex,
    TruncationError,
    brst_charge,
    check_nilpotency,
    homology,
    quotient_dimension_oracle,
    verify_charge,
)
from .model import ConstantRankError, ModelError, ZeroSectionError, default_grid, load_model, validate_model
from .poly import CoeffPoly, PolyMatrix, SignatureError
from .split import (
    InvalidOffsetError,
    InvalidSigmaError,
    build_sigma,
    c_prime,
    constraint_polys,
    solve_connection,
    split_identity_residuals,
)

__all__ = ["main", "run", "UsageError"]

SCHEMA = 1
COMMANDS = ("validate", "split", "simulate", "lagrange-check", "classify", "kt", "brst")


class UsageError(ValueError):
    """Bad flags or malformed input; maps to exit status 2."""


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="quadham", description="Hamiltonian analysis of degenerate quadratic Lagrangians.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)
    for name in COMMANDS:
        p = sub.add_parser(name)
        p.add_argument("--model", required=True, help="model JSON file")
        p.add_argument("--out", help="output directory (default: report to stdout)")
        p.add_argument("--grid", default="3", help="points per axis, or a JSON list of (t, q...) points")
        p.add_argument("--sigma1", help="JSON m x m matrix of polynomial literals")
        p.add_argument("--upsilon", help="JSON length-m vector of polynomial literals")
        p.add_argument("--seed", type=int, default=0)
        p.add_argument("--tol-residual", type=float, default=1e-4)
        p.add_argument("--tol-drift", type=float, default=1e-8)
        if name in ("simulate", "lagrange-check"):
            p.add_argument("--initial", required=True, help="JSON [t0, q..., p...] or [q..., p...]")
            p.add_argument("--t-end", type=float, default=1.0)
            p.add_argument("--step", type=float, default=1e-3)
        if name in ("kt", "brst"):
            p.add_argument("--K", type=int, default=4)
        if name == "kt":
            p.add_argument("--D", type=int, default=2)
    return parser


# option decoding


def _json_arg(text, what):
    path = Path(text)
    try:
        if path.suffix == ".json" and path.exists():
            return json.loads(path.read_text())
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise UsageError(f"{what}: invalid JSON ({exc})") from exc


def _grid(args, model):
    text = str(args.grid).strip()
    if text.isdigit():
        n = int(text)
        if n < 1:
            raise UsageError("--grid must be positive")
        return default_grid(model, n)
    pts = _json_arg(text, "--grid")
    if not isinstance(pts, list) or not pts or any(len(p) != model.m + 1 for p in pts):
        raise UsageError(f"--grid points must be nonempty lists of {model.m + 1} numbers")
    return [tuple(float(x) for x in p) for p in pts]


def _sigma1(args, m):
    if args.sigma1 is None:
        return None
    rows = _json_arg(args.sigma1, "--sigma1")
    try:
        return PolyMatrix.from_rows([[CoeffPoly.from_literal(x, m) for x in row] for row in rows], num_q=m)
    except (TypeError, KeyError, ValueError) as exc:
        raise UsageError(f"--sigma1: {exc}") from exc


def _upsilon(args, m):
    if args.upsilon is None:
        return None
    vec = _json_arg(args.upsilon, "--upsilon")
    try:
        return [CoeffPoly.from_literal(x, m) for x in vec]
    except (TypeError, KeyError, ValueError) as exc:
        raise UsageError(f"--upsilon: {exc}") from exc


def _initial(args, m):
    vals = _json_arg(args.initial, "--initial")
    if not isinstance(vals, list) or len(vals) not in (2 * m, 2 * m + 1):
        raise UsageError(f"--initial needs {2 * m} or {2 * m + 1} numbers")
    vals = [float(x) for x in vals]
    if len(vals) == 2 * m:
        vals = [0.0] + vals
    return vals[0], vals[1 : 1 + m], vals[1 + m :]


def _check_ranges(args):
    if getattr(args, "step", 1.0) <= 0:
        raise UsageError("--step must be positive")
    if getattr(args, "K", 1) < 1:
        raise UsageError("--K must be at least 1")
    if getattr(args, "D", 0) < 0:
        raise UsageError("--D must be nonnegative")
    if args.tol_residual < 0 or args.tol_drift < 0:
        raise UsageError("tolerances must be nonnegative")


# report formatting


def _fmt(x):
    """Round floats to 12 significant digits so reports are stable text."""
    if isinstance(x, float):
        if not math.isfinite(x):
            return str(x)
        return float(format(x, ".12e"))
    if isinstance(x, dict):
        return {str(k): _fmt(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_fmt(v) for v in x]
    if isinstance(x, np.generic):
        return _fmt(x.item())
    return x


def _dumps(report) -> str:
    return json.dumps(_fmt(report), indent=2, sort_keys=True) + "\n"


def _matrix_str(mat: PolyMatrix):
    return [[str(mat[i, j]) for j in range(mat.shape[1])] for i in range(mat.shape[0])]


# commands


def _setup(args):
    model = load_model(args.model)
    grid = _grid(args, model)
    return model, grid


def _symbolic_pipeline(args, model):
    split = build_sigma(model, _sigma1(args, model.m))
    if not split.symbolic:
        raise UsageError("this command needs a constant mass matrix a (exact splitting)")
    frame = solve_connection(model, split, _upsilon(args, model.m))
    H = build_hamiltonian(model, split, frame)
    return split, frame, H


def cmd_validate(args):
    model, grid = _setup(args)
    rep = validate_model(model, grid)
    return {"validation": rep.to_dict()}, True


def cmd_split(args):
    model, grid = _setup(args)
    validate_model(model, grid)
    split, frame, H = _symbolic_pipeline(args, model)
    resid = split_identity_residuals(split, grid)
    weak = check_association(model, split, H, "weak", grid)
    full = check_association(model, split, H, "full", grid)
    report = {
        "sigma0": _matrix_str(split.sigma0),
        "sigma1": _matrix_str(split.sigma1),
        "projector": _matrix_str(split.projector()),
        "complement": _matrix_str(split.complement()),
        "constraints": [str(f) for f in constraint_polys(split)],
        "connection": [str(g) for g in frame.gamma],
        "c_prime": str(c_prime(model, split)),
        "hamiltonian": str(H.hfun),
        "identity_residuals": resid,
        "association": {"weak": weak.to_dict(), "full": full.to_dict()},
    }
    ok = max(resid.values()) <= args.tol_residual and weak.max_residual <= args.tol_residual
    return report, ok


def _simulate(args):
    model, grid = _setup(args)
    validate_model(model, grid)
    split, frame, H = _symbolic_pipeline(args, model)
    t0, q0, p0 = _initial(args, model.m)
    if args.t_end <= t0:
        raise UsageError("--t-end must exceed the initial time")
    traj = integrate_hamilton(H, (t0, q0, p0), args.t_end, args.step)
    return model, split, frame, H, traj


def _write_traj(args, traj, files):
    if args.out:
        path = Path(args.out) / "trajectory.csv"
        path.write_text(traj.to_csv())
        files["trajectory"] = path.name


def cmd_simulate(args, files):
    model, split, frame, H, traj = _simulate(args)
    _write_traj(args, traj, files)
    drift = constraint_drift(traj, split, model)
    last = traj.samples[-1]
    report = {
        "hamiltonian": str(H.hfun),
        "samples": len(traj),
        "step": args.step,
        "final": {"t": last[0], "q": list(traj.q[-1]), "p": list(traj.p[-1])},
        "drift": drift,
    }
    return report, drift <= args.tol_drift


def cmd_lagrange_check(args, files):
    model, split, frame, H, traj = _simulate(args)
    _write_traj(args, traj, files)
    drift = constraint_drift(traj, split, model)
    lag = lagrange_residual(traj, model)
    gauge, mom = split_residuals(traj, split, model, frame)
    try:
        constrained = constrained_equation_check(traj, split, model, H, args.tol_drift)
    except NotApplicableError:
        constrained = None
    report = {
        "drift": drift,
        "lagrange_residual": lag,
        "gauge_residual": gauge,
        "momentum_residual": mom,
        "constrained_residual": constrained,
    }
    ok = (
        drift <= args.tol_drift
        and constrained is not None
        and max(lag, gauge, mom, constrained) <= args.tol_residual
    )
    return report, ok


def cmd_classify(args):
    model, grid = _setup(args)
    validate_model(model, grid)
    split, frame, H = _symbolic_pipeline(args, model)
    primary = [f for f in constraint_polys(split) if not f.is_zero()]
    result = constraint_algorithm(H, ConstraintSet(primary), split)
    cls = classify_constraints(result.constraints, split)
    report = {"algorithm": result.to_dict(), "classification": cls.to_dict()}
    report["classification"]["generators"] = [str(g) for g in result.constraints.generators]
    return report, result.closed


def cmd_kt(args):
    model, grid = _setup(args)
    validate_model(model, grid)
    split = build_sigma(model, _sigma1(args, model.m))
    cx = KTComplex(model, split, args.K)
    nil = check_nilpotency(cx, seed=args.seed)
    table = []
    ok = nil.ok
    for D in range(args.D + 1):
        oracle = quotient_dimension_oracle(cx, D, seed=args.seed)
        for k in range(args.K):
            rep = homology(cx, k, D).to_dict()
            if k == 0:
                rep["oracle"] = oracle
                ok = ok and rep["h_dim"] == oracle
            elif rep["complete"]:
                ok = ok and rep["h_dim"] == 0
            table.append(rep)
    report = {
        "K": args.K,
        "D": args.D,
        "irreducible": cx.irreducible(),
        "differential": {str(g): str(cx.images[g]) for g in cx.antighosts()},
        "nilpotency": nil.to_dict(),
        "homology": table,
    }
    return report, ok


def cmd_brst(args):
    model, grid = _setup(args)
    validate_model(model, grid)
    split = build_sigma(model, _sigma1(args, model.m))
    cx = KTComplex(model, split, args.K)
    Q = brst_charge(cx)
    chk = verify_charge(cx, seed=args.seed)
    return {"K": args.K, "charge": str(Q), "verification": chk.to_dict()}, chk.ok


_HANDLERS = {
    "validate": cmd_validate,
    "split": cmd_split,
    "classify": cmd_classify,
    "kt": cmd_kt,
    "brst": cmd_brst,
}


# errors that mean "the hypotheses of a check do not hold" (exit 1)
_CHECK_ERRORS = (ConstantRankError, ZeroSectionError, DivergenceError, InvalidConstraintError)
# errors that mean "the input is malformed" (exit 2)
_INPUT_ERRORS = (
    UsageError,
    ModelError,
    SignatureError,
    InvalidSigmaError,
    InvalidOffsetError,
    InvalidFrameError,
    TruncationError,
)


def _check_failure(exc):
    out = {"type": type(exc).__name__, "message": str(exc)}
    rep = getattr(exc, "report", None)
    if rep is not None:
        out["validation"] = rep.to_dict()
    last = getattr(exc, "last_good", None)
    if last is not None:
        out["last_good"] = [float(x) for x in last]
    return out


def run(argv=None, stdout=None) -> int:
    """Parse ``argv``, dispatch, write artifacts; returns the exit status."""
    stdout = stdout if stdout is not None else sys.stdout
    args = None
    files: dict = {}
    try:
        args = build_parser().parse_args(argv)
        _check_ranges(args)
        if args.out:
            Path(args.out).mkdir(parents=True, exist_ok=True)
        base = {"schema": SCHEMA, "command": args.command, "model": Path(args.model).name, "seed": args.seed}
        try:
            if args.command == "simulate":
                body, ok = cmd_simulate(args, files)
            elif args.command == "lagrange-check":
                body, ok = cmd_lagrange_check(args, files)
            else:
                body, ok = _HANDLERS[args.command](args)
            report = {**base, "status": "pass" if ok else "fail", **body}
            code = 0 if ok else 1
        except _CHECK_ERRORS as exc:
            report = {**base, "status": "fail", "failure": _check_failure(exc)}
            code = 1
    except _INPUT_ERRORS as exc:
        report = {"schema": SCHEMA, "status": "error", "error": {"type": type(exc).__name__, "message": str(exc)}}
        code = 2
    if files:
        report["files"] = files
    text = _dumps(report)
    if args is not None and args.out:
        (Path(args.out) / "report.json").write_text(text)
    else:
        stdout.write(text)
    return code


def main(argv=None) -> None:
    sys.exit(run(argv))


if __name__ == "__main__":
    main()
