"""Command-line front end.

Exit codes: 0 success, 1 usage error, 2 numerical failure, 3 invariant violation.
All quantities are dimensionless: lengths in units of the chosen length
scale, ``a`` in 1/length**3 and ``b`` in 1/length.
"""
from __future__ import annotations

import argparse
import json
import math
import sys
from concurrent.futures import ThreadPoolExecutor
from dataclasses import fields, replace
from pathlib import Path

import numpy as np

from .config import RunConfig, SolverConfig
from .curves import GeneratingParams, circle_curve, curve_scalars, find_closed_curves
from .errors import InvariantViolation, NotApplicable, NumericalFailure
from . import verify
from .io import read_curve_csv, write_curve_csv, write_report_json, write_rows_csv
from .spectral import assemble_sl_operator, eigen_spectrum, write_spectrum_csv
from .stability import (
    build_report,
    oracle_critical_length,
    per_mode_critical_length,
    rayleigh_note,
    scan_min_eigenvalue,
    stronger_bound,
    theorem1_bound,
    theorem2_bound,
)

EXIT_OK, EXIT_USAGE, EXIT_NUMERIC, EXIT_INVARIANT = 0, 1, 2, 3


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _positive(kind):
    def conv(text):
        val = kind(text)
        if not val > 0:
            raise argparse.ArgumentTypeError(f"must be positive, got {text}")
        return val
    return conv


def _bracket(text):
    lo, sep, hi = text.partition(":")
    try:
        lo, hi = float(lo), float(hi)
    except ValueError:
        raise argparse.ArgumentTypeError("expected MIN:MAX") from None
    if not sep or not 0 < lo < hi:
        raise argparse.ArgumentTypeError("expected 0 < MIN < MAX")
    return lo, hi


def _common():
    p = argparse.ArgumentParser(add_help=False)
    g = p.add_argument_group("configuration (flags override --config)")
    g.add_argument("--config", type=Path, help="JSON file with solver keys and output_dir")
    g.add_argument("--output-dir", type=Path)
    for f in fields(SolverConfig):
        kind = int if f.type == "int" else float
        g.add_argument("--" + f.name.replace("_", "-"), dest=f.name, type=kind, default=None)
    return p


def build_parser():
    common = _common()
    parser = _Parser(prog="rotcyl", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("circle", parents=[common], help="write an analytic circular generating curve")
    p.add_argument("--r", type=_positive(float), required=True)
    p.add_argument("--a", type=float, required=True)
    p.add_argument("--n-samples", type=int, default=256)
    p.add_argument("--out", type=Path)

    p = sub.add_parser("solve", parents=[common], help="shoot for closed curves with given a, b, k")
    p.add_argument("--a", type=float, required=True)
    p.add_argument("--b", type=float, required=True)
    p.add_argument("--k", type=_positive(int), default=1, help="dihedral symmetry order")
    p.add_argument("--n", type=_positive(int), default=1, help="rotation index")
    p.add_argument("--r0", type=_bracket, required=True, metavar="MIN:MAX")
    p.add_argument("--scan-points", type=int, default=64)
    p.add_argument("--n-samples", type=int, default=1024)

    p = sub.add_parser("analyze", parents=[common], help="stability report for a curve file")
    p.add_argument("curve", type=Path)
    p.add_argument("--l", type=_positive(float), help="column length to classify")
    p.add_argument("--json", type=Path, help="report path (default: <output-dir>/<stem>_report.json)")
    p.add_argument("--scan-csv", type=Path, help="l,min_eigenvalue path (default: <stem>_scan.csv)")
    p.add_argument("--scan-points", type=int, default=12)
    p.add_argument("--no-oracle", action="store_true", help="skip the 2D oracle")

    p = sub.add_parser("sweep", parents=[common], help="bounds and critical lengths for circles over a")
    p.add_argument("--a-min", type=float, required=True)
    p.add_argument("--a-max", type=float, required=True)
    p.add_argument("--steps", type=int, required=True)
    p.add_argument("--r", type=_positive(float), default=1.0)
    p.add_argument("--out", type=Path)
    p.add_argument("--no-oracle", action="store_true")
    p.add_argument("--jobs", type=_positive(int), default=1)

    p = sub.add_parser("verify", parents=[common], help="run the invariant suite")
    p.add_argument("--corpus", type=Path, help="directory of extra curve CSV files")
    p.add_argument("--skip-stability", action="store_true", help="skip the oracle-based checks")
    p.add_argument("--spectrum-dir", type=Path, help="dump the lowest eigenvalues per corpus curve")
    return parser


def resolve_config(args):
    run = RunConfig.load(args.config) if args.config else RunConfig()
    overrides = {f.name: getattr(args, f.name) for f in fields(SolverConfig)
                 if getattr(args, f.name) is not None}
    solver = replace(run.solver, **overrides)
    out = args.output_dir if args.output_dir is not None else run.output_dir
    return RunConfig(solver, out)


def _fmt_len(x):
    return "n/a" if x is None else ("inf" if math.isinf(x) else f"{x:.6f}")


def cmd_circle(args, run):
    curve = circle_curve(args.r, args.a, args.n_samples)
    out = args.out or run.output_dir / f"circle_r{args.r:g}_a{args.a:g}.csv"
    out.parent.mkdir(parents=True, exist_ok=True)
    write_curve_csv(out, curve)
    print(f"wrote {out} (a={curve.params.a:g}, b={curve.params.b:.15g}, L={curve.length:.15g})")
    return EXIT_OK


def cmd_solve(args, run):
    params = GeneratingParams(args.a, args.b, args.k, args.n)
    lo, hi = args.r0
    curves, failures = find_closed_curves(params, lo, hi, args.scan_points, run.solver, args.n_samples)
    run.output_dir.mkdir(parents=True, exist_ok=True)
    summary = {"a": args.a, "b": args.b, "k": args.k, "n": args.n, "r0_range": [lo, hi],
               "curves": [], "failed_brackets": []}
    for i, curve in enumerate(curves):
        path = run.output_dir / f"curve_a{args.a:g}_b{args.b:g}_k{args.k}_{i}.csv"
        write_curve_csv(path, curve)
        res = curve.residuals()
        summary["curves"].append({
            "file": str(path), "r0": curve.r0, "length": curve.length,
            "closure_residual": res["closure"], "curvature_law_residual": res["curvature_law"],
            "turning_residual": res["turning"], "embedded": curve.is_embedded(),
            "circle": curve.is_circle(),
        })
        print(f"closed curve {i}: r0={curve.r0:.15g} L={curve.length:.10g} -> {path}")
    for bracket, exc in failures:
        summary["failed_brackets"].append({"bracket": list(bracket), "error": str(exc)})
    summary_path = run.output_dir / f"solve_a{args.a:g}_b{args.b:g}_k{args.k}.json"
    with open(summary_path, "w") as fh:
        json.dump(summary, fh, indent=2)
    print(f"summary -> {summary_path}")
    if not curves:
        print("no closed curve found: residual has no usable sign change in the range", file=sys.stderr)
        return EXIT_NUMERIC
    return EXIT_OK


def cmd_analyze(args, run):
    curve = read_curve_csv(args.curve, run.solver)
    report = build_report(curve, args.l, run.solver, compute_oracle=not args.no_oracle)
    stem = args.curve.stem
    run.output_dir.mkdir(parents=True, exist_ok=True)
    json_path = args.json or run.output_dir / f"{stem}_report.json"
    write_report_json(json_path, report)
    crit = report.oracle_critical if report.oracle_critical is not None else report.per_mode_critical
    if math.isfinite(crit) and args.scan_points > 0:
        lengths = np.linspace(0.25, 2.0, args.scan_points) * crit
        scan_path = args.scan_csv or run.output_dir / f"{stem}_scan.csv"
        write_rows_csv(scan_path, ["l", "min_eigenvalue"], scan_min_eigenvalue(curve, lengths, run.solver))
        print(f"scan -> {scan_path}")
    print(f"theorem1 = {_fmt_len(report.theorem1)}  theorem2 = {_fmt_len(report.theorem2)}  "
          f"stronger = {report.stronger_bound.value}")
    print(f"per-mode critical = {_fmt_len(report.per_mode_critical)}  "
          f"oracle critical = {_fmt_len(report.oracle_critical)}")
    if report.verdict is not None:
        print(f"verdict at l = {args.l:g}: {report.verdict.value} (margin {report.margin:+.4g})")
        note = rayleigh_note(curve, report)
        if note:
            print(f"note: {note}")
    print(f"report -> {json_path}")
    return EXIT_OK


SWEEP_HEADER = ["a", "b", "theorem1", "theorem2", "stronger", "per_mode_critical", "oracle_critical"]


def sweep_row(r, a, config, with_oracle=True):
    curve = circle_curve(r, a, 256)
    sc = curve_scalars(curve)
    b = curve.params.b
    try:
        t1 = theorem1_bound(sc, a)
    except NotApplicable:
        t1 = None
    try:
        t2 = theorem2_bound(sc, a, b)
    except NotApplicable:
        t2 = None
    per_mode = per_mode_critical_length(curve, config.m_max, config.n_grid)
    oracle = oracle_critical_length(curve, config, per_mode) if with_oracle else None
    return [float(a), float(b), t1 if t1 is not None else "n/a", t2 if t2 is not None else "n/a",
            stronger_bound(sc, a, b).value, per_mode, oracle if oracle is not None else "n/a"]


def cmd_sweep(args, run):
    if args.steps < 1:
        raise UsageError("--steps must be >= 1")
    if args.steps == 1:
        avals = [args.a_min]
    else:
        if not args.a_max > args.a_min:
            raise UsageError("--a-max must exceed --a-min")
        avals = list(np.linspace(args.a_min, args.a_max, args.steps))
    with ThreadPoolExecutor(max_workers=args.jobs) as pool:
        rows = list(pool.map(lambda a: sweep_row(args.r, a, run.solver, not args.no_oracle), avals))
    out = args.out or run.output_dir / f"sweep_r{args.r:g}.csv"
    out.parent.mkdir(parents=True, exist_ok=True)
    write_rows_csv(out, SWEEP_HEADER, rows)
    for row in rows:
        print(",".join(str(x) for x in row))
    print(f"sweep -> {out}")
    return EXIT_OK


def cmd_verify(args, run):
    checks = verify.run_all(run.solver, args.corpus, include_stability=not args.skip_stability)
    if args.spectrum_dir is not None:
        args.spectrum_dir.mkdir(parents=True, exist_ok=True)
        for i, (name, curve) in enumerate(verify.builtin_corpus(run.solver)):
            spec = eigen_spectrum(assemble_sl_operator(curve, run.solver.n_grid), 16)
            write_spectrum_csv(args.spectrum_dir / f"spectrum_{i}.csv", spec)
    for c in checks:
        print(c.line())
    failed = [c for c in checks if not c.passed]
    print(f"{len(checks) - len(failed)}/{len(checks)} checks passed")
    return EXIT_OK if not failed else EXIT_INVARIANT


COMMANDS = {"circle": cmd_circle, "solve": cmd_solve, "analyze": cmd_analyze,
            "sweep": cmd_sweep, "verify": cmd_verify}


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        run = resolve_config(args)
        return COMMANDS[args.command](args, run)
    except (UsageError, ValueError) as exc:
        print(f"rotcyl {args.command}: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except InvariantViolation as exc:
        print(f"rotcyl {args.command}: {exc}", file=sys.stderr)
        return EXIT_INVARIANT
    except NumericalFailure as exc:
        print(f"rotcyl {args.command}: numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except OSError as exc:
        print(f"rotcyl {args.command}: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
