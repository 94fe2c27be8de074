"""Command-line interface: ``structpencil {compute,sweep,compare,verify,generate}``.

Exit codes: 0 success, 1 input error, 2 infinite backward error (compute),
3 a checked invariant failed (compare, verify).
"""

from __future__ import annotations

import argparse
import json
import sys

from . import backward_errors as be
from .errors import EmptyKernel, StructPencilError
from .fileio import parse_lambda, pencil_to_dict, read_pencil, read_vectors, write_pencil
from .model import Blocks, EigenPairQuery, Field, PerturbationScope, ReportKind, Structure
from .oracle import OracleConfig, random_structured_pencil
from .reports import (
    build_comparison,
    format_comparison,
    format_report_text,
    format_verification,
    grid_values,
    reports_csv,
    reports_machine,
    run_verification,
    sweep,
    sweep_columns,
    sweep_csv,
    sweep_minimizers,
)

EXIT_OK, EXIT_INPUT, EXIT_INFINITE, EXIT_CHECK = 0, 1, 2, 3


def _scopes(text: str | None) -> list[Blocks]:
    if not text:
        return list(Blocks)
    return [Blocks.parse(t) for t in text.split(",") if t.strip()]


def _structures(text: str) -> list[Structure]:
    return {"block": [Structure.BLOCK], "sym": [Structure.SYMMETRY],
            "both": [Structure.BLOCK, Structure.SYMMETRY]}[text]


def _grid(text: str) -> tuple[float, float, int]:
    parts = text.split(":")
    if len(parts) != 3:
        raise ValueError(f"grid must be t_min:t_max:count, got {text!r}")
    t_min, t_max, count = float(parts[0]), float(parts[1]), int(parts[2])
    if count < 1:
        raise ValueError("grid count must be positive")
    return t_min, t_max, count


def _pencil_or_generated(args):
    if args.pencil:
        return read_pencil(args.pencil)
    return random_structured_pencil(args.n, args.m, args.seed, strictly_passive=True)


def cmd_compute(args) -> int:
    p = read_pencil(args.pencil)
    lam = parse_lambda(args.lam)
    x1, x2, x3 = read_vectors(args.x, p.n, p.m)
    q = EigenPairQuery(lam, x1, x2, x3)
    field = Field(args.field)
    # an explicit --scopes list with a single structure must be honored exactly;
    # otherwise unavailable combinations are skipped
    strict = bool(args.scopes) and args.structure != "both"
    reports = []
    for b in _scopes(args.scopes):
        for st in _structures(args.structure):
            try:
                scope = PerturbationScope(b, st, field)
            except StructPencilError:
                if strict:
                    raise
                continue
            reports.append(be.backward_error(scope, p, q))
    if not reports:
        raise ValueError("no requested scope is available for this structure/field combination")
    if args.output == "text":
        header = (f"eta = {args.fmt(be.eta_unstructured(p, q))}, "
                  f"eta_even = {args.fmt(be.eta_even(p, q))}")
        print(header)
        for rep in reports:
            print(format_report_text(rep, args.precision))
    elif args.output == "csv":
        sys.stdout.write(reports_csv(reports, args.precision))
    else:
        sys.stdout.write(reports_machine(reports))
    return EXIT_INFINITE if any(r.kind is ReportKind.INFINITE for r in reports) else EXIT_OK


def cmd_sweep(args) -> int:
    p = read_pencil(args.pencil)
    t_min, t_max, count = _grid(args.grid)
    ts = grid_values(t_min, t_max, count)
    cols = sweep_columns(_scopes(args.scopes), _structures(args.structure))
    values = sweep(p, ts, cols, jobs=args.jobs)
    prec = None if args.output == "machine" else args.precision
    sys.stdout.write(sweep_csv(ts, cols, values, prec))
    for name, t, v in sweep_minimizers(ts, cols, values):
        print(f"grid minimizer {name}: t={t!r} value={v!r}", file=sys.stderr)
    return EXIT_OK


def cmd_compare(args) -> int:
    p = _pencil_or_generated(args)
    try:
        table = build_comparison(p, args.num_lambdas, args.seed, jobs=args.jobs)
    except EmptyKernel as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except AssertionError as exc:
        print(f"invariant violated: {exc}", file=sys.stderr)
        return EXIT_CHECK
    sys.stdout.write(format_comparison(table, args.precision, args.output))
    return EXIT_OK


def cmd_verify(args) -> int:
    pencil = read_pencil(args.pencil) if args.pencil else None
    cfg = OracleConfig(restarts=args.restarts, seed=args.seed)
    counts = run_verification(args.seed, args.n, args.m, args.instances, cfg, pencil)
    print(format_verification(counts))
    return EXIT_OK if all(c.ok for c in counts.values()) else EXIT_CHECK


def cmd_generate(args) -> int:
    p = random_structured_pencil(args.n, args.m, args.seed, strictly_passive=not args.no_passive,
                                 real=args.real)
    meta = {"seed": args.seed, "description": f"random structured pencil n={args.n} m={args.m}"}
    if args.out:
        write_pencil(args.out, p, meta)
    else:
        print(json.dumps(pencil_to_dict(p, meta), indent=1))
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--precision", type=int, default=5, help="significant digits in text/csv output")
    common.add_argument("--output", choices=["text", "csv", "machine"], default="text")
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--jobs", type=int, default=1, help="worker threads for rows")

    parser = argparse.ArgumentParser(prog="structpencil", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    c = sub.add_parser("compute", parents=[common], help="eigenpair backward errors for one (lambda, x)")
    c.add_argument("--pencil", required=True)
    c.add_argument("--lambda", dest="lam", required=True, help="purely imaginary, e.g. i0.25")
    c.add_argument("--x", required=True, help="vector file with x1, x2, x3")
    c.add_argument("--scopes")
    c.add_argument("--structure", choices=["block", "sym", "both"], default="block")
    c.add_argument("--field", choices=["complex", "real"], default="complex")
    c.set_defaults(func=cmd_compute)

    s = sub.add_parser("sweep", parents=[common], help="eigenvalue backward errors on a grid of lambda = i t")
    s.add_argument("--pencil", required=True)
    s.add_argument("--grid", required=True, help="t_min:t_max:count")
    s.add_argument("--scopes")
    s.add_argument("--structure", choices=["block", "sym", "both"], default="block")
    s.set_defaults(func=cmd_sweep)

    k = sub.add_parser("compare", parents=[common], help="comparison tables on admissible random queries")
    k.add_argument("--pencil")
    k.add_argument("--n", type=int, default=4)
    k.add_argument("--m", type=int, default=3)
    k.add_argument("--num-lambdas", type=int, default=7)
    k.set_defaults(func=cmd_compare)

    v = sub.add_parser("verify", parents=[common], help="run the invariant suite")
    v.add_argument("--pencil")
    v.add_argument("--n", type=int, default=4)
    v.add_argument("--m", type=int, default=3)
    v.add_argument("--instances", type=int, default=10)
    v.add_argument("--restarts", type=int, default=OracleConfig.restarts)
    v.set_defaults(func=cmd_verify)

    g = sub.add_parser("generate", parents=[common], help="write a seeded random pencil file")
    g.add_argument("--n", type=int, default=4)
    g.add_argument("--m", type=int, default=3)
    g.add_argument("--real", action="store_true")
    g.add_argument("--no-passive", action="store_true", help="skip the strict passivity screen")
    g.add_argument("--out")
    g.set_defaults(func=cmd_generate)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    args.fmt = lambda v: f"{v:.{args.precision}g}"
    try:
        return args.func(args)
    except (StructPencilError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
