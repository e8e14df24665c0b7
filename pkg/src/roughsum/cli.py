"""Command-line entry point: ``roughsum <subcommand> ...``.

Every subcommand prints JSON by default (CSV with ``--emit csv`` where rows are
homogeneous). Exit status is 0 on success, 1 when an experiment predicate
fails and 2 on usage or input errors.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import os
import sys
from pathlib import Path

import numpy as np

from . import __version__
from .dyadic import (
    MATERIALISE_MAX,
    bisect_to_dyadics,
    decompose_peaked,
    greedy_decompose,
    iter_b_set,
    n_of,
    smallest_enclosing,
    tilde_set,
)
from .experiments import NAMES, SCHEMA_VERSION, report_json, resolve_config, rows_csv, run_experiment, write_report
from .lattice_path import IntervalZ, load_path
from .levy_area import build_area_table
from .lognorm import QuadratureSpec, big_l_norm_quadrature, big_l_norm_spectral, l_norm
from .series import (
    DiscreteONS,
    FourierSystem,
    coeffs_finite2var_example,
    haar_ons,
    load_coeffs,
    partial_sum_path,
)
from .variation import p_var_exact, table_one_var

OUT_DIR_ENV = "ROUGHSUM_OUT_DIR"


class UsageError(Exception):
    pass


def _emit(payload: dict, fmt: str, rows: list[dict] | None = None) -> str:
    if fmt == "json":
        return json.dumps({"schema_version": SCHEMA_VERSION, **payload}, sort_keys=True, indent=2) + "\n"
    if rows is None:
        rows = [payload]
    buf = io.StringIO()
    writer = csv.DictWriter(buf, fieldnames=list(rows[0]), lineterminator="\n")
    writer.writeheader()
    writer.writerows(rows)
    return buf.getvalue()


def _interval(path, lo, hi) -> IntervalZ:
    lo = 0 if lo is None else lo
    hi = path.N if hi is None else hi
    if not 0 <= lo < hi <= path.N:
        raise UsageError(f"need 0 <= --from < --to <= {path.N}, got {lo}, {hi}")
    return IntervalZ(lo, hi)


# --- subcommands -----------------------------------------------------------


def cmd_pvar(args) -> int:
    path = load_path(args.input)
    res = p_var_exact(path, args.p, _interval(path, args.lo, args.hi))
    payload = {"p": args.p, "power_sum": res.power_sum, "norm": res.norm, "partition": list(res.optimal_partition)}
    row = dict(payload, partition=" ".join(map(str, payload["partition"])))
    sys.stdout.write(_emit(payload, args.emit, [row]))
    return 0


def cmd_area(args) -> int:
    path = load_path(args.input)
    J = _interval(path, args.lo, args.hi)
    table = build_area_table(path)
    A = table.entry(J.a, J.b)
    two_var = p_var_exact(path, 2.0, J).power_sum
    one_var = table_one_var(table, J).power_sum
    payload = {
        "from": J.a, "to": J.b, "area": A.tolist(), "area_norm": table.norm(J.a, J.b),
        "two_var": two_var, "area_one_var": one_var, "rough_norm_sq": two_var + one_var,
    }
    rows = [{"row": a, "col": b, "value": A[a, b]} for a in range(A.shape[0]) for b in range(A.shape[1])]
    sys.stdout.write(_emit(payload, args.emit, rows))
    return 0


def cmd_dyadic(args) -> int:
    J = IntervalZ(args.a, args.b)
    peaked = decompose_peaked(J)
    enc = smallest_enclosing(J)
    payload = {
        "interval": [J.a, J.b],
        "n": n_of(J),
        "peaked": peaked.to_dict(),
        "greedy": [p.to_dict() for p in greedy_decompose(J)],
        "bisection": [p.to_dict() for p in bisect_to_dyadics(J)],
        "smallest_enclosing": enc.to_dict(),
        "size": len(peaked.pieces),
        "size_bound": 4 * math.log2(J.length + 1),
        "b_set_size": sum(1 for _ in iter_b_set(J)),
    }
    if J.length <= MATERIALISE_MAX:
        payload["tilde_set_size"] = len(tilde_set(J))
    sys.stdout.write(_emit(payload, "json"))
    return 0


def cmd_series(args) -> int:
    if args.coeffs:
        c = load_coeffs(args.coeffs)
    elif args.example == "finite2var":
        c = coeffs_finite2var_example(args.n_max)
    else:
        raise UsageError("give --coeffs or --example")
    if args.system == "fourier":
        system, omega = FourierSystem(), args.theta
    else:
        m = args.m or len(c) + 1
        system, omega = haar_ons(m, args.seed), args.omega
        if not isinstance(system, DiscreteONS) or omega is None:
            raise UsageError("--system discrete needs --omega in 1..m")
    path = partial_sum_path(system, c, omega, args.N)
    table = build_area_table(path)
    two_var = p_var_exact(path, 2.0).power_sum
    one_var = table_one_var(table).power_sum
    payload = {
        "system": args.system, "omega": omega, "N": path.N, "dim": path.dim,
        "two_var": two_var, "area_one_var": one_var, "rough_norm_sq": two_var + one_var,
        "path": path.values.tolist(),
    }
    rows = [{"k": k, **{f"x{j}": v for j, v in enumerate(x)}} for k, x in enumerate(path.values)]
    sys.stdout.write(_emit(payload, args.emit, rows))
    return 0


def cmd_norm(args) -> int:
    c = load_coeffs(args.coeffs)
    q = QuadratureSpec(M=args.M, h=args.h)
    spectral = big_l_norm_spectral(c, args.s, q)
    direct = big_l_norm_quadrature(c, args.s, q)
    payload = {
        "s": args.s, "M": args.M, "h": args.h, "method": args.method,
        "value": spectral if args.method == "spectral" else direct,
        "spectral": spectral, "direct": direct, "gap": abs(spectral - direct),
        "l_norm": l_norm(c, args.s),
    }
    sys.stdout.write(_emit(payload, "json"))
    return 0


def _parse_value(text: str):
    text = text.strip()
    if "," in text and not text.startswith("["):
        return [_parse_value(t) for t in text.split(",")]
    try:
        return json.loads(text)
    except json.JSONDecodeError:
        return text


def read_config_file(path: str | Path) -> dict:
    """``key = value`` lines; '#' starts a comment; values parse as JSON when possible."""
    out = {}
    try:
        lines = Path(path).read_text().splitlines()
    except OSError as exc:
        raise UsageError(f"cannot read config {path}: {exc}") from exc
    for lineno, line in enumerate(lines, 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise UsageError(f"{path}:{lineno}: expected key = value")
        key, value = line.split("=", 1)
        out[key.strip().replace("-", "_")] = _parse_value(value)
    return out


def cmd_exp(args) -> int:
    config = read_config_file(args.config) if args.config else {}
    flags = {"seed": args.seed, "trials": args.trials, "m": args.m, "n_max": args.n_max,
             "theta": args.theta, "theta_grid": args.theta_grid}
    defaults = resolve_config(args.name)
    for key, value in flags.items():
        if value is None:
            continue
        if key not in defaults:
            raise UsageError(f"experiment {args.name} does not take --{key.replace('_', '-')}")
        config[key] = _parse_value(value) if isinstance(value, str) else value
    try:
        resolve_config(args.name, config)
    except KeyError as exc:
        raise UsageError(exc.args[0]) from exc
    report = run_experiment(args.name, config, threads=args.threads)
    out = args.out or os.environ.get(OUT_DIR_ENV)
    if out:
        out = Path(out)
        try:
            out.mkdir(parents=True, exist_ok=True)
        except OSError as exc:
            raise UsageError(f"cannot create output directory {out}: {exc}") from exc
        write_report(report, "json", out / f"{args.name}.json")
        write_report(report, "csv", out / f"{args.name}.csv")
        (out / f"{args.name}_rows.csv").write_text(rows_csv(report))
        if not args.no_figure:
            from .plotting import render_report

            render_report(report, out / f"{args.name}.png")
    if args.emit == "csv":
        sys.stdout.write(rows_csv(report))
    else:
        sys.stdout.write(report_json(report))
    print(f"{args.name}: {'pass' if report.passed else 'FAIL'} (ratio {report.ratio:.6g})", file=sys.stderr)
    return 0 if report.passed else 1


# --- parser ----------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="roughsum", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("pvar", help="exact p-variation of a lattice path")
    p.add_argument("--input", required=True, help="CSV or JSON path file, one knot per row")
    p.add_argument("--p", type=float, default=2.0)
    p.add_argument("--from", dest="lo", type=int)
    p.add_argument("--to", dest="hi", type=int)
    p.add_argument("--emit", choices=("json", "csv"), default="json")
    p.set_defaults(func=cmd_pvar)

    p = sub.add_parser("area", help="Levy area and rough-path norm on an interval")
    p.add_argument("--input", required=True)
    p.add_argument("--from", dest="lo", type=int)
    p.add_argument("--to", dest="hi", type=int)
    p.add_argument("--emit", choices=("json", "csv"), default="json")
    p.set_defaults(func=cmd_area)

    p = sub.add_parser("dyadic", help="dyadic decompositions of the interval [a, b]")
    p.add_argument("a", type=int)
    p.add_argument("b", type=int)
    p.set_defaults(func=cmd_dyadic)

    p = sub.add_parser("series", help="partial-sum path of a coefficient sequence")
    p.add_argument("--coeffs", help="CSV with index,re,im columns")
    p.add_argument("--example", choices=("finite2var",))
    p.add_argument("--n-max", type=int, default=8, help="number of blocks for --example")
    p.add_argument("--system", choices=("fourier", "discrete"), default="fourier")
    p.add_argument("--theta", type=float, default=math.pi)
    p.add_argument("--omega", type=int)
    p.add_argument("--m", type=int, help="size of the discrete system (default len(c) + 1)")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--N", type=int)
    p.add_argument("--emit", choices=("json", "csv"), default="json")
    p.set_defaults(func=cmd_series)

    p = sub.add_parser("norm", help="log-Sobolev norms of a trigonometric polynomial")
    p.add_argument("--coeffs", required=True)
    p.add_argument("--s", type=float, default=0.5)
    p.add_argument("--method", choices=("spectral", "direct"), default="spectral")
    p.add_argument("--M", type=int, default=2048)
    p.add_argument("--h", type=float, default=1e-4)
    p.set_defaults(func=cmd_norm)

    p = sub.add_parser("exp", help="run a named experiment")
    p.add_argument("name", choices=NAMES)
    p.add_argument("--seed", type=int)
    p.add_argument("--trials", type=int)
    p.add_argument("--m", help="system size (comma list for walk_growth)")
    p.add_argument("--n-max", type=int)
    p.add_argument("--theta", help="angle(s) for example_local, comma separated")
    p.add_argument("--theta-grid", type=int)
    p.add_argument("--config", help="key = value file; flags override it")
    p.add_argument("--out", help=f"directory for report files and figure (default ${OUT_DIR_ENV})")
    p.add_argument("--no-figure", action="store_true")
    p.add_argument("--threads", type=int, default=1)
    p.add_argument("--emit", choices=("json", "csv"), default="json")
    p.set_defaults(func=cmd_exp)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"roughsum {args.command}: {exc}", file=sys.stderr)
        return 2
    except (ValueError, KeyError, OSError, OverflowError) as exc:
        print(f"roughsum {args.command}: error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
