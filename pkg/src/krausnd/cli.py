"""Command-line interface.

Every command prints a JSON document on standard output and a one-line
summary on standard error. Exit status is 0 when the command's check passes,
1 when a check fails and 2 on usage or input errors.
"""

from __future__ import annotations

import argparse
import json
import sys

import numpy as np

from . import __version__
from .channel import validate
from .errors import KrausError, PreconditionViolated, PropertyViolation
from .families import random_commuting_normal, random_kraus_isometry
from .files import complex_to_json, family_to_dict, read_family, read_state
from .spectral import build_witness, simultaneous_diagonalize
from .structure import decompose, theorem_check, verify_decomposition
from .trajectory import (
    build_cyclic_example,
    build_truncated_example,
    empirical_measure,
    enumerate_measure,
    sample_strings,
    total_variation,
)

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2


def _jsonable(obj):
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(x) for x in obj]
    if isinstance(obj, np.ndarray):
        if np.iscomplexobj(obj):
            return complex_to_json(obj)
        return _jsonable(obj.tolist())
    if isinstance(obj, (np.bool_, bool)):
        return bool(obj)
    if isinstance(obj, np.integer):
        return int(obj)
    if isinstance(obj, (np.floating, float)):
        return float(obj)
    if isinstance(obj, complex):
        return [obj.real, obj.imag]
    return obj


def _emit(args, doc: dict, summary: str):
    text = json.dumps(_jsonable(doc), indent=2 if args.pretty else None)
    if args.output:
        with open(args.output, "w") as fh:
            fh.write(text + "\n")
    else:
        sys.stdout.write(text + "\n")
    sys.stderr.write(summary + "\n")


def _family(args):
    F = read_family(args.family)
    return F.with_tol(args.tol) if args.tol is not None else F


def _validation_doc(rep):
    return {
        "defect_matrix": rep.defect_matrix,
        "defect_norm": rep.defect_norm,
        "is_normalized": rep.is_normalized,
        "pairwise_commutators": rep.pairwise_commutators,
        "max_commutator": rep.max_commutator,
        "normality_defects": rep.normality_defects,
        "is_commuting": rep.is_commuting,
        "is_normal_family": rep.is_normal_family,
    }


def cmd_validate(args) -> int:
    rep = validate(_family(args))
    _emit(args, _validation_doc(rep), rep.summary())
    return EXIT_OK if rep.is_normalized else EXIT_FAIL


def cmd_analyze(args) -> int:
    F = _family(args)
    try:
        D = decompose(F)
    except (PreconditionViolated, PropertyViolation) as exc:
        _emit(args, {"ok": False, "error": str(exc)}, f"analysis failed: {exc}")
        return EXIT_FAIL
    rep = verify_decomposition(F, D, steps=args.steps)
    doc = {
        "ok": rep.all_ok,
        "dim_F": D.dim_F,
        "dim_D": D.dim_D,
        "basis": D.basis,
        "blocks": {"A": D.A, "B": D.B, "C": D.C},
        "lower_left_residual": D.lower_left_residual,
        "stationary_state": D.rho.rho,
        "rho_F_min_eigenvalue": D.rho_F.min_eigenvalue,
        "spectral_radius_D": D.spectral_radius_D,
        "faithful_ok": rep.faithful_ok,
        "radius_ok": rep.radius_ok,
        "diagonal_fixed_points_ok": rep.diagonal_fixed_points_ok,
        "fixed_point_offdiag": rep.fixed_point_offdiag,
        "n_fixed_points": rep.n_fixed_points,
        "transience_decay": rep.transience_decay,
        "transience_ok": rep.transience_ok,
    }
    summary = (f"dim_F={D.dim_F} dim_D={D.dim_D} radius_D={D.spectral_radius_D:.6g} "
               f"{'ok' if rep.all_ok else 'FAIL'}")
    _emit(args, doc, summary)
    return EXIT_OK if rep.all_ok else EXIT_FAIL


def _theorem_doc(rep):
    return {
        "applicable": rep.applicable,
        "failed_hypotheses": rep.failed_hypotheses,
        "passed": rep.passed,
        "defect_norm": rep.defect_norm,
        "max_commutator": rep.max_commutator,
        "normality_defects": rep.normality_defects,
        "all_normal": rep.all_normal,
        "B_blocks_zero": rep.B_blocks_zero,
        "dim_F": rep.dim_F,
        "dim_D": rep.dim_D,
        "error": rep.error,
        "proof_trace": [step.to_dict() for step in rep.proof_trace],
    }


def cmd_check_theorem(args) -> int:
    rep = theorem_check(_family(args))
    _emit(args, _theorem_doc(rep), rep.summary())
    return EXIT_OK if rep.passed else EXIT_FAIL


def cmd_diagonalize(args) -> int:
    F = _family(args)
    try:
        J = simultaneous_diagonalize(F)
    except PreconditionViolated as exc:
        _emit(args, {"ok": False, "error": str(exc)}, str(exc))
        return EXIT_FAIL
    W = build_witness(J)
    errors = W.relative_errors(F)
    ok = bool(np.all(errors <= 1e-9))
    doc = {
        "ok": ok,
        "joint_eigenstructure": {
            "basis": J.basis,
            "eigenvalue_table": J.eigenvalue_table,
            "classes": J.classes,
            "offdiag_residuals": J.offdiag_residuals,
        },
        "witness": {
            "N": W.N,
            "lambda_values": W.lambda_values,
            "f_table": W.f_table,
            "relative_errors": errors,
        },
    }
    _emit(args, doc, f"{J.n_classes} joint eigenvalue classes; max witness error {errors.max():.3e}")
    return EXIT_OK if ok else EXIT_FAIL


def _measure_doc(table):
    return [{"string": list(s), "p": p} for s, p in table.entries.items()]


def cmd_measure(args) -> int:
    F = _family(args)
    psi, _ = read_state(args.state)
    table = enumerate_measure(F, psi, args.length)
    doc = {"length": table.length, "total": table.total, "entries": _measure_doc(table)}
    _emit(args, doc, f"{len(table)} strings, total probability {table.total:.17g}")
    return EXIT_OK


def cmd_simulate(args) -> int:
    F = _family(args)
    psi, _ = read_state(args.state)
    samples = sample_strings(F, psi, args.length, args.samples, seed=args.seed)
    emp = empirical_measure(samples, F.m)
    doc = {"length": args.length, "samples": args.samples, "seed": args.seed,
           "frequencies": _measure_doc(emp)}
    summary = f"{args.samples} trajectories of length {args.length}"
    try:
        exact = enumerate_measure(F, psi, args.length)
        tv = total_variation(emp, exact)
        doc["total_variation"] = tv
        summary += f"; total variation to exact measure {tv:.4g}"
    except KrausError:
        pass
    _emit(args, doc, summary)
    return EXIT_OK


def cmd_example(args) -> int:
    if args.which == "cyclic":
        ex = build_cyclic_example(args.dim, L=args.length)
        rep = validate(ex.family)
        ok = ex.max_abs_diff <= 1e-12 and rep.is_normalized and rep.is_commuting
        doc = {
            "family": family_to_dict(ex.family, {"example": "cyclic", "dim": args.dim}),
            "validation": _validation_doc(rep),
            "fourier_check": {
                "length": ex.length,
                "table": [{"n1": k[0], "n2": k[1], "p": v} for k, v in ex.fourier_table.items()],
                "max_abs_diff": ex.max_abs_diff,
            },
        }
        summary = f"cyclic example d={args.dim}: Fourier max diff {ex.max_abs_diff:.3e}"
    else:
        ex = build_truncated_example(args.dim, L=args.length)
        rep = theorem_check(ex.family)
        ok = ex.no_leak_max_diff <= 1e-12 and not rep.applicable
        doc = {
            "family": family_to_dict(ex.family, {"example": "truncated", "dim": args.dim}),
            "defect_norm": ex.defect_norm,
            "normality_defect_V1": ex.normality_defect,
            "theorem_check": _theorem_doc(rep),
            "no_leak_check": {"length": ex.length, "cyclic_dim": ex.cyclic_dim,
                              "max_abs_diff": ex.no_leak_max_diff},
        }
        summary = (f"truncated example d={args.dim}: defect {ex.defect_norm:.3g}, "
                   f"normality defect {ex.normality_defect:.6g}; {rep.summary()}")
    _emit(args, doc, summary)
    return EXIT_OK if ok else EXIT_FAIL


def cmd_gen(args) -> int:
    make = random_kraus_isometry if args.kind == "isometry" else random_commuting_normal
    tol = args.tol if args.tol is not None else 1e-9
    F = make(args.dim, args.ops, seed=args.seed, tol=tol)
    meta = {"generator": args.kind, "seed": args.seed}
    _emit(args, family_to_dict(F, meta), f"{args.kind} family d={args.dim} m={args.ops} seed={args.seed}")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--tol", type=float, default=None, help="override the family tolerance")
    common.add_argument("-o", "--output", help="write JSON here instead of stdout")
    common.add_argument("--pretty", action="store_true", help="indent JSON output")

    p = argparse.ArgumentParser(prog="krausnd", description=__doc__.splitlines()[0])
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("validate", parents=[common], help="normalization/commutation report")
    s.add_argument("family")
    s.set_defaults(func=cmd_validate)

    s = sub.add_parser("analyze", parents=[common], help="fast/decaying decomposition")
    s.add_argument("family")
    s.add_argument("--steps", type=int, default=20, help="transience steps to record")
    s.set_defaults(func=cmd_analyze)

    s = sub.add_parser("check-theorem", parents=[common], help="commuting => normal check")
    s.add_argument("family")
    s.set_defaults(func=cmd_check_theorem)

    s = sub.add_parser("diagonalize", parents=[common], help="joint eigenbasis and witness N")
    s.add_argument("family")
    s.set_defaults(func=cmd_diagonalize)

    s = sub.add_parser("measure", parents=[common], help="enumerate string probabilities")
    s.add_argument("family")
    s.add_argument("state")
    s.add_argument("--length", "-L", type=int, required=True)
    s.set_defaults(func=cmd_measure)

    s = sub.add_parser("simulate", parents=[common], help="Monte Carlo trajectories")
    s.add_argument("family")
    s.add_argument("state")
    s.add_argument("--length", "-L", type=int, required=True)
    s.add_argument("--samples", "-n", type=int, default=10_000)
    s.add_argument("--seed", type=int, default=0)
    s.set_defaults(func=cmd_simulate)

    s = sub.add_parser("example", parents=[common], help="shift-operator example families")
    s.add_argument("which", choices=["cyclic", "truncated"])
    s.add_argument("--dim", "-d", type=int, required=True)
    s.add_argument("--length", "-L", type=int, default=None)
    s.set_defaults(func=cmd_example)

    s = sub.add_parser("gen", parents=[common], help="random Kraus families")
    s.add_argument("kind", choices=["isometry", "commuting"])
    s.add_argument("--dim", "-d", type=int, required=True)
    s.add_argument("--ops", "-m", type=int, required=True)
    s.add_argument("--seed", type=int, default=0)
    s.set_defaults(func=cmd_gen)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    if args.command == "example" and args.which == "cyclic" and args.length is None:
        args.length = 4
    try:
        return args.func(args)
    except PreconditionViolated as exc:
        sys.stderr.write(f"krausnd: {exc}\n")
        return EXIT_FAIL
    except (KrausError, OSError, ValueError) as exc:
        sys.stderr.write(f"krausnd: {exc}\n")
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
