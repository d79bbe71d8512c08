"""Command-line front end.

Subcommands
-----------
constant   evaluate every closed form available for a system and cross-check
           them against each other
verify     check the closed forms against kernel-level numerics: the
           hemisphere supremum and the boundary-data integral route
sweep      tabulate the sharp constant over a kappa range; writes a CSV and,
           unless --no-plot, a PNG figure next to it
criteria   decide the classical maximum modulus principle for coefficient
           systems read from a JSON document

Exit status: 0 success; 1 mathematical failure (a cross-check out of
tolerance, a criteria verdict of "fails", or non-convergent quadrature);
2 input error (bad arguments, domain violations, malformed documents).

Environment variables supply defaults; explicit flags win over them:
ELLIPMAX_ABS_TOL (1-D quadrature tolerance), ELLIPMAX_HEMI_TOL (hemisphere
cubature tolerance), ELLIPMAX_TRUNCATION_FACTOR (boundary truncation radius
as a multiple of the observation height), ELLIPMAX_COARSE_POINTS (direction
search grid size).
"""
from __future__ import annotations

import argparse
import csv
import math
import os
import sys
import time
from pathlib import Path

import numpy as np

from . import constants, criteria, kernels, numerics, oracle
from .report import RunReport
from .systems_io import SchemaError, load_criteria_document

__all__ = ["main", "build_parser"]

EXIT_OK = 0
EXIT_MATH = 1
EXIT_INPUT = 2

ENV_ABS_TOL = "ELLIPMAX_ABS_TOL"
ENV_HEMI_TOL = "ELLIPMAX_HEMI_TOL"
ENV_TRUNCATION = "ELLIPMAX_TRUNCATION_FACTOR"
ENV_COARSE = "ELLIPMAX_COARSE_POINTS"

SYSTEM_CHOICES = (
    kernels.KIND_HARMONIC,
    kernels.KIND_LAME,
    kernels.KIND_STOKES,
    kernels.KIND_BIHARMONIC,
    kernels.KIND_PLANAR,
)

# exact reference values quoted in the closed-form tables
_EXACT = "exact"


class InputError(Exception):
    """User-facing input problem; maps to exit status 2."""


def _resolve(flag_value, env_name: str, fallback, cast=float):
    """Flag > environment > built-in default."""
    if flag_value is not None:
        return flag_value
    raw = os.environ.get(env_name)
    if raw is None:
        return fallback
    try:
        return cast(raw)
    except ValueError as exc:
        raise InputError(f"environment variable {env_name}={raw!r}: {exc}") from exc


def _reject_params(args, kind: str, *names: str) -> None:
    for name in names:
        if getattr(args, name, None) is not None:
            raise InputError(f"--{name} does not apply to the {kind} system")


def _build_system(args) -> kernels.SystemSpec:
    kind = args.system
    if kind == kernels.KIND_PLANAR:
        if args.n not in (None, 2):
            raise InputError("planar-deformed is a planar system; --n must be 2")
        n = 2
    else:
        n = args.n if args.n is not None else 3
    if kind == kernels.KIND_HARMONIC:
        _reject_params(args, kind, "kappa", "lam", "mu", "nu")
        return kernels.SystemSpec.harmonic(n)
    if kind == kernels.KIND_LAME:
        _reject_params(args, kind, "nu")
        if args.lam is not None or args.mu is not None:
            if args.kappa is not None:
                raise InputError("give either --kappa or --lam/--mu, not both")
            if args.lam is None or args.mu is None:
                raise InputError("--lam and --mu must be given together")
            return kernels.SystemSpec.lame(n, lam=args.lam, mu=args.mu)
        if args.kappa is None:
            raise InputError("the lame system needs --kappa or --lam and --mu")
        return kernels.SystemSpec.lame(n, kappa=args.kappa)
    if kind == kernels.KIND_STOKES:
        _reject_params(args, kind, "kappa", "lam", "mu")
        return kernels.SystemSpec.stokes(n, nu=args.nu if args.nu is not None else 1.0)
    if kind == kernels.KIND_BIHARMONIC:
        _reject_params(args, kind, "kappa", "lam", "mu", "nu")
        return kernels.SystemSpec.biharmonic(n)
    _reject_params(args, kind, "kappa", "lam", "mu", "nu")
    return kernels.SystemSpec.planar_deformed()


def _result_row(name: str, res: constants.SharpConstantResult, **extra) -> dict:
    row = {"name": name, "value": res.value, "err_est": res.err_est, "method": res.method}
    row.update(extra)
    return row


def _exact_row(name: str, value: float) -> dict:
    return {"name": name, "value": value, "err_est": 0.0, "method": _EXACT}


def _cross_check_rows(rows: list[dict], floor: float = 1e-12) -> tuple[list[dict], bool]:
    """All pairwise |difference| <= err_i + err_j + floor."""
    checks = []
    all_ok = True
    for i in range(len(rows)):
        for j in range(i + 1, len(rows)):
            diff = abs(rows[i]["value"] - rows[j]["value"])
            tol = rows[i]["err_est"] + rows[j]["err_est"] + floor
            ok = diff <= tol
            all_ok = all_ok and ok
            checks.append(
                {
                    "pair": f"{rows[i]['name']} vs {rows[j]['name']}",
                    "abs_diff": diff,
                    "tol": tol,
                    "ok": ok,
                }
            )
    return checks, all_ok


def _closed_form_rows(spec: kernels.SystemSpec, abs_tol: float) -> tuple[list[dict], list[str]]:
    """Every closed form that applies to the system, as report rows."""
    qspec = numerics.QuadratureSpec(abs_tol=abs_tol)
    rows: list[dict] = []
    notes: list[str] = list(spec.notes)
    kind, n = spec.kind, spec.n

    if kind == kernels.KIND_HARMONIC:
        rows.append(_exact_row("exact_value", 1.0))
        rows.append(
            _result_row("integral_form", constants.lame_stokes_constant(n, 0.0, qspec))
        )
        notes.append("scalar harmonic functions obey the plain maximum principle")
        return rows, notes

    if kind == kernels.KIND_LAME:
        kappa = spec.kappa
        rows.append(
            _result_row("integral_form", constants.lame_stokes_constant(n, kappa, qspec))
        )
        if n == 2 and kappa >= 0.0:
            rows.append(
                _result_row("elliptic_form", constants.lame_constant_2d_elliptic(kappa))
            )
            if kappa < 1.0:
                terms = constants.series_terms_for(kappa, abs_tol)
                rows.append(
                    _result_row(
                        "series_form",
                        constants.lame_constant_2d_series(kappa, terms),
                        terms=terms,
                    )
                )
        if n == 3 and kappa >= 0.0:
            rows.append(_result_row("log_form", constants.lame_constant_3d_log(kappa)))
        if kappa < 0.0 and n in (2, 3):
            notes.append("the elliptic/series/log forms require kappa >= 0; skipped")
        return rows, notes

    if kind == kernels.KIND_STOKES:
        rows.append(_result_row("gamma_ratio_form", constants.stokes_constant(n)))
        rows.append(
            _result_row("integral_form", constants.lame_stokes_constant(n, 1.0, qspec))
        )
        if n == 2:
            rows.append(_exact_row("exact_value", 4.0 / math.pi))
            rows.append(_result_row("elliptic_form", constants.lame_constant_2d_elliptic(1.0)))
        elif n == 3:
            rows.append(_exact_row("exact_value", 1.5))
            rows.append(_result_row("log_form", constants.lame_constant_3d_log(1.0)))
        elif n == 4:
            rows.append(_exact_row("exact_value", 16.0 / (3.0 * math.pi)))
        return rows, notes

    if kind == kernels.KIND_BIHARMONIC:
        rows.append(
            _result_row("integral_form", constants.biharmonic_gradient_constant(n, qspec))
        )
        exact = {
            2: 4.0 / math.pi,
            3: 0.5 + 2.0 * math.pi * math.sqrt(3.0) / 9.0,
            4: 2.0,
        }.get(n)
        if exact is not None:
            rows.append(_exact_row("exact_value", exact))
        notes.append("bound on |grad u| for biharmonic u against sup |grad u| on the boundary")
        return rows, notes

    # planar deformed state
    rows.append(_result_row("deformed_state_bound", constants.planar_deformed_constant()))
    rows.append(_exact_row("exact_value", 4.0 / math.pi))
    notes.append(
        "coincides with the planar Stokes constant and the planar biharmonic gradient bound"
    )
    return rows, notes


def _system_inputs(spec: kernels.SystemSpec) -> dict:
    inputs = {"system": spec.kind, "n": spec.n}
    if spec.kappa is not None:
        inputs["kappa"] = spec.kappa
    if spec.lam is not None:
        inputs["lam"] = spec.lam
        inputs["mu"] = spec.mu
    if spec.nu is not None:
        inputs["nu"] = spec.nu
    return inputs


def cmd_constant(args) -> tuple[RunReport, int]:
    spec = _build_system(args)
    abs_tol = _resolve(args.abs_tol, ENV_ABS_TOL, numerics.DEFAULT_ABS_TOL_1D)
    rows, notes = _closed_form_rows(spec, abs_tol)
    checks, all_ok = _cross_check_rows(rows)
    report = RunReport(
        command="constant",
        inputs={**_system_inputs(spec), "abs_tol": abs_tol},
        results=rows,
        cross_checks=checks,
        notes=notes,
    )
    return report, EXIT_OK if all_ok else EXIT_MATH


def cmd_verify(args) -> tuple[RunReport, int]:
    spec = _build_system(args)
    if spec.kind in (kernels.KIND_BIHARMONIC, kernels.KIND_PLANAR):
        raise InputError(
            f"{spec.kind} has no boundary kernel in scope; "
            "verify supports harmonic, lame, stokes"
        )
    if spec.n not in (2, 3):
        raise InputError("verify needs --n 2 or --n 3 (numerical routes)")
    abs_tol = _resolve(args.abs_tol, ENV_ABS_TOL, numerics.DEFAULT_ABS_TOL_1D)
    hemi_tol = _resolve(args.hemi_tol, ENV_HEMI_TOL, numerics.DEFAULT_ABS_TOL_HEMISPHERE)
    factor = _resolve(args.truncation_factor, ENV_TRUNCATION, oracle.DEFAULT_TRUNCATION_FACTOR)
    coarse = _resolve(args.coarse_points, ENV_COARSE, None, cast=int)
    if not factor > 10.0:
        raise InputError(f"truncation factor must exceed 10, got {factor}")

    reference = constants.lame_stokes_constant(
        spec.n, spec.kappa, numerics.QuadratureSpec(abs_tol=abs_tol)
    )
    rows = [_result_row("closed_form", reference)]
    checks: list[dict] = []
    notes: list[str] = list(spec.notes)
    all_ok = True

    if args.level in ("sup", "both"):
        sup_res = oracle.hemisphere_sup(
            spec, numerics.QuadratureSpec(abs_tol=hemi_tol), coarse_points=coarse
        )
        rows.append(_result_row("hemisphere_sup", sup_res, argmax=sup_res.metadata["argmax"]))
        diff = abs(sup_res.value - reference.value)
        tol = max(1e-6, reference.err_est + sup_res.err_est)
        ok = diff <= tol
        all_ok = all_ok and ok
        checks.append(
            {"pair": "closed_form vs hemisphere_sup", "abs_diff": diff, "tol": tol, "ok": ok}
        )

    if args.level in ("extremal", "both"):
        kernel = kernels.kernel_for(spec)
        x = np.zeros(spec.n)
        x[-1] = 1.0
        z = np.zeros(kernel.m)
        z[-1] = 1.0
        probe = oracle.ExtremalProbe(x=x, z=z, truncation_radius=factor * x[-1])
        data = oracle.extremal_boundary_data(kernel, probe)
        value, err_est = oracle.evaluate_solution_component(kernel, probe, data)
        rows.append(
            {
                "name": "extremal_route",
                "value": value,
                "err_est": err_est,
                "method": constants.METHOD_EXTREMAL,
                "x": x.tolist(),
                "z": z.tolist(),
                "truncation_radius": factor * x[-1],
            }
        )
        diff = abs(value - reference.value)
        tol = max(1e-3, reference.err_est + err_est)
        ok = diff <= tol
        all_ok = all_ok and ok
        checks.append(
            {"pair": "closed_form vs extremal_route", "abs_diff": diff, "tol": tol, "ok": ok}
        )
        notes.append(
            "extremal route: solution component at x for the saturating boundary "
            "data, over the truncated boundary disk"
        )

    report = RunReport(
        command="verify",
        inputs={
            **_system_inputs(spec),
            "level": args.level,
            "abs_tol": abs_tol,
            "hemi_tol": hemi_tol,
            "truncation_factor": factor,
        },
        results=rows,
        cross_checks=checks,
        notes=notes,
    )
    return report, EXIT_OK if all_ok else EXIT_MATH


def _sweep_value(n: int, kappa: float, qspec) -> tuple[float, float, str]:
    if n == 2 and 0.0 <= kappa <= 1.0:
        res = constants.lame_constant_2d_elliptic(kappa)
    elif n == 3 and 0.0 <= kappa <= 1.0:
        res = constants.lame_constant_3d_log(kappa)
    else:
        res = constants.lame_stokes_constant(n, kappa, qspec)
    return res.value, res.err_est, res.method


def cmd_sweep(args) -> tuple[RunReport, int]:
    if args.system != kernels.KIND_LAME:
        raise InputError("sweep varies kappa; only the lame system has a free kappa")
    if args.param != "kappa":
        raise InputError(f"unknown sweep parameter {args.param!r}; only kappa is swept")
    n = args.n if args.n is not None else 3
    if args.steps < 2:
        raise InputError(f"--steps must be at least 2, got {args.steps}")
    if not args.stop > args.start:
        raise InputError(f"--to ({args.stop}) must exceed --from ({args.start})")
    for endpoint in (args.start, args.stop):
        if not kernels.KAPPA_MIN < endpoint <= 1.0:
            raise InputError(
                f"kappa endpoint {endpoint} outside the admissible range "
                f"({kernels.KAPPA_MIN}, 1]"
            )
    abs_tol = _resolve(args.abs_tol, ENV_ABS_TOL, numerics.DEFAULT_ABS_TOL_1D)
    qspec = numerics.QuadratureSpec(abs_tol=abs_tol)
    out_path = Path(args.out)
    if out_path.parent and not out_path.parent.exists():
        raise InputError(f"output directory does not exist: {out_path.parent}")

    kappas = np.linspace(args.start, args.stop, args.steps)
    rows = []
    for kappa in kappas:
        value, err_est, method = _sweep_value(n, float(kappa), qspec)
        rows.append(
            {"name": f"kappa={float(kappa)!r}", "value": value, "err_est": err_est, "method": method}
        )

    with open(out_path, "w", newline="") as handle:
        writer = csv.writer(handle)
        writer.writerow(["parameter", "value", "err_est", "method"])
        for kappa, row in zip(kappas, rows):
            writer.writerow(
                [repr(float(kappa)), repr(row["value"]), repr(row["err_est"]), row["method"]]
            )
    artifacts = {"table": str(out_path)}

    if not args.no_plot:
        from .plotting import render_sweep_figure

        png_path = out_path.with_suffix(".png")
        render_sweep_figure(
            kappas,
            [r["value"] for r in rows],
            [r["err_est"] for r in rows],
            title=f"lame sharp constant, n={n}",
            param_label="kappa",
            out_path=png_path,
        )
        artifacts["figure"] = str(png_path)

    report = RunReport(
        command="sweep",
        inputs={
            "system": args.system,
            "n": n,
            "param": args.param,
            "from": args.start,
            "to": args.stop,
            "steps": args.steps,
            "abs_tol": abs_tol,
        },
        results=rows,
        artifacts=artifacts,
    )
    return report, EXIT_OK


def _complex_entry(value: complex) -> float | list[float]:
    if value.imag == 0.0:
        return float(value.real)
    return [float(value.real), float(value.imag)]


def _witness_list(vec) -> list | None:
    if vec is None:
        return None
    arr = np.asarray(vec)
    if np.iscomplexobj(arr):
        return [_complex_entry(complex(v)) for v in arr]
    return [float(v) for v in arr]


def _verdict_dict(v: criteria.CriteriaVerdict) -> dict:
    d: dict = {
        "system": v.system_label,
        "path": v.path,
        "strongly_elliptic": v.strongly_elliptic.ok,
        "min_symbol_eigenvalue": v.strongly_elliptic.min_eigenvalue,
    }
    if not v.strongly_elliptic.ok:
        d["ellipticity_witness_sigma"] = _witness_list(v.strongly_elliptic.witness_sigma)
        d["ellipticity_witness_zeta"] = _witness_list(v.strongly_elliptic.witness_zeta)
    if v.condition_i is not None:
        d["condition_i"] = {
            "holds": v.condition_i.holds,
            "residual": v.condition_i.residual,
        }
        if v.condition_i.reason:
            d["condition_i"]["reason"] = v.condition_i.reason
    if v.condition_ii is not None:
        d["condition_ii"] = {
            "status": v.condition_ii.status,
            "min_value": v.condition_ii.min_value,
        }
        if v.condition_ii.status == "fails":
            d["condition_ii"]["witness"] = _witness_list(v.condition_ii.witness)
    if v.overall and v.condition_ii is not None and v.condition_ii.status == "holds_boundary":
        d["overall"] = "holds (boundary case)"
    else:
        d["overall"] = "holds" if v.overall else "fails"
    d["notes"] = list(v.notes)
    return d


def cmd_criteria(args) -> tuple[RunReport, int]:
    systems = load_criteria_document(args.input)
    verdicts = [
        criteria.check_mmp(
            system, complex_path=args.complex_path, samples=args.samples, grid=args.grid
        )
        for system in systems
    ]
    conjunction = all(v.overall for v in verdicts)
    notes = [
        f"{sum(v.overall for v in verdicts)} of {len(verdicts)} system(s) satisfy "
        "the maximum modulus principle criteria"
    ]
    report = RunReport(
        command="criteria",
        inputs={
            "input": str(args.input),
            "complex_path": args.complex_path,
            "samples": args.samples,
            "grid": args.grid,
        },
        verdicts=[_verdict_dict(v) for v in verdicts],
        notes=notes,
    )
    return report, EXIT_OK if conjunction else EXIT_MATH


def _add_system_arguments(sub, with_level: bool = False) -> None:
    sub.add_argument("system", choices=SYSTEM_CHOICES, help="system to evaluate")
    sub.add_argument("--n", type=int, default=None, help="space dimension (default 3; 2 for planar-deformed)")
    sub.add_argument("--kappa", type=float, default=None, help="kernel parameter (lame)")
    sub.add_argument("--lam", type=float, default=None, help="first Lame modulus")
    sub.add_argument("--mu", type=float, default=None, help="second Lame modulus (shear)")
    sub.add_argument("--nu", type=float, default=None, help="viscosity (stokes; value is irrelevant to the constant)")
    sub.add_argument("--abs-tol", type=float, default=None, help=f"1-D quadrature tolerance (env {ENV_ABS_TOL})")
    sub.add_argument("--json", action="store_true", help="emit a JSON report on stdout")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="ellipmax",
        description="sharp constants and maximum-principle criteria for half-space elliptic systems",
    )
    subparsers = parser.add_subparsers(dest="subcommand", required=True)

    p_const = subparsers.add_parser(
        "constant", help="closed forms for one system, cross-checked"
    )
    _add_system_arguments(p_const)
    p_const.set_defaults(func=cmd_constant)

    p_verify = subparsers.add_parser(
        "verify", help="closed forms against kernel-level numerics"
    )
    _add_system_arguments(p_verify)
    p_verify.add_argument(
        "--level",
        choices=("sup", "extremal", "both"),
        default="both",
        help="which numerical routes to run (default both)",
    )
    p_verify.add_argument(
        "--hemi-tol",
        type=float,
        default=None,
        help=f"hemisphere cubature tolerance (env {ENV_HEMI_TOL})",
    )
    p_verify.add_argument(
        "--truncation-factor",
        type=float,
        default=None,
        help=f"boundary truncation radius / observation height (env {ENV_TRUNCATION})",
    )
    p_verify.add_argument(
        "--coarse-points",
        type=int,
        default=None,
        help=f"direction-search grid size (env {ENV_COARSE})",
    )
    p_verify.set_defaults(func=cmd_verify)

    p_sweep = subparsers.add_parser("sweep", help="tabulate the constant over a kappa range")
    _add_system_arguments(p_sweep)
    p_sweep.add_argument("--param", default="kappa", help="swept parameter (only kappa)")
    p_sweep.add_argument("--from", dest="start", type=float, required=True, help="first kappa")
    p_sweep.add_argument("--to", dest="stop", type=float, required=True, help="last kappa")
    p_sweep.add_argument("--steps", type=int, required=True, help="number of points (>= 2)")
    p_sweep.add_argument("--out", required=True, help="CSV output path")
    p_sweep.add_argument(
        "--no-plot", action="store_true", help="skip the PNG figure next to the CSV"
    )
    p_sweep.set_defaults(func=cmd_sweep)

    p_crit = subparsers.add_parser(
        "criteria", help="maximum modulus principle verdicts for a JSON document"
    )
    p_crit.add_argument("input", help="path to the JSON system document")
    p_crit.add_argument(
        "--complex-path",
        choices=("direct", "doubled"),
        default="direct",
        help="treat complex systems directly or through realification (default direct)",
    )
    p_crit.add_argument("--samples", type=int, default=256, help="ellipticity direction samples")
    p_crit.add_argument("--grid", type=int, default=2048, help="condition (ii) search grid size")
    p_crit.add_argument("--json", action="store_true", help="emit a JSON report on stdout")
    p_crit.set_defaults(func=cmd_criteria)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        code = exc.code
        return int(code) if code is not None else 0
    started = time.perf_counter()
    try:
        report, exit_code = args.func(args)
    except InputError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except SchemaError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except numerics.QuadratureError as exc:
        print(f"error: quadrature did not converge: {exc}", file=sys.stderr)
        return EXIT_MATH
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    report.wall_time_s = time.perf_counter() - started
    sys.stdout.write(report.to_json() if args.json else report.to_text())
    return exit_code


if __name__ == "__main__":
    sys.exit(main())
