"""Command-line interface.

Subcommands: tangent, deform, verify, limit, fiber, analyze.
Exit codes: 0 success, 2 input validation, 3 resource cap exhausted,
4 verification/check failure, 5 internal invariant breach.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
import time

from .action import ActionError
from .deform import (
    InternalInvariantError,
    ResourceCapError,
    SpecValidationError,
    build_presentation,
    covariant_basis,
    fiber_over_zero,
    run,
    tangent_space,
    verify,
)
from .degeneration import flat_limit, psg_column_weights
from .files import (
    load_ideal_file,
    load_problem,
    load_result,
    result_to_dict,
    save_result,
)
from .groebner import UnitIdeal, ideal_equal, krull_dimension, weighted_hilbert_series
from .ring import gm_weight, poly_parse, poly_print

EXIT_OK = 0
EXIT_VALIDATION = 2
EXIT_RESOURCE = 3
EXIT_CHECK_FAILED = 4
EXIT_INTERNAL = 5


def _threads(value) -> int:
    n = int(value)
    if n < 1:
        raise argparse.ArgumentTypeError("thread count must be >= 1")
    return n


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="invdef",
        description=(
            "Exact equivariant deformation calculus: tangent spaces and "
            "universal invariant deformations of G-stable subschemes."
        ),
    )
    parser.add_argument(
        "--threads",
        type=_threads,
        default=int(os.environ.get("INVDEF_THREADS", "1")),
        help="worker threads (results are independent of this setting)",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("tangent", help="tangent-space dimension, weights, and basis rows")
    p.add_argument("problem")
    p.add_argument("--json", action="store_true")

    p = sub.add_parser("deform", help="compute the universal deformation (S, K, U, V)")
    p.add_argument("problem")
    p.add_argument("--max-order", type=int, default=None)
    p.add_argument("--positive-only", action="store_true")
    p.add_argument("--out", default=None, help="result file path (JSON)")

    p = sub.add_parser("verify", help="re-check a result file against its problem")
    p.add_argument("result")
    p.add_argument("problem")
    p.add_argument("--json", action="store_true")

    p = sub.add_parser("limit", help="flat limit of the ideal under a one-parameter subgroup")
    p.add_argument("problem")
    p.add_argument("--psg", required=True, help="comma-separated diagonal exponents, e.g. -3,-2,-2")
    p.add_argument("--json", action="store_true")

    p = sub.add_parser("fiber", help="ideal of the fiber over zero of the quotient map")
    p.add_argument("result")
    p.add_argument("problem")
    p.add_argument("--json", action="store_true")

    p = sub.add_parser("analyze", help="Krull dimension and weighted Hilbert series of an ideal")
    p.add_argument("ideal")
    p.add_argument("--weights", default=None, help="comma-separated positive weights")
    p.add_argument("--json", action="store_true")
    return parser


def cmd_tangent(args) -> int:
    spec = load_problem(args.problem)
    pres = build_presentation(spec)
    cov = covariant_basis(spec, pres)
    tangent = tangent_space(spec, pres, cov)
    rows = [[poly_print(e) for e in row.entries[0]] for row in tangent.rows]
    if args.json:
        print(
            json.dumps(
                {
                    "dimension": tangent.dimension,
                    "t_weights": tangent.t_weights,
                    "rows": rows,
                },
                indent=1,
            )
        )
    else:
        print(f"tangent dimension d = {tangent.dimension}")
        print(f"t-weights: {tangent.t_weights}")
        for i, row in enumerate(rows):
            print(f"s{i+1}: [" + ", ".join(row) + "]")
    return EXIT_OK


def cmd_deform(args) -> int:
    spec = load_problem(args.problem)
    if args.max_order is not None:
        spec.max_order = args.max_order
    if args.positive_only:
        spec.positive_weight_only = True
    log_lines: list = []
    t0 = time.time()

    def log(msg: str):
        log_lines.append(msg)
        print(f"[{time.time()-t0:8.1f}s] {msg}", file=sys.stderr, flush=True)

    result = run(spec, log=log)
    report = verify(result, spec)
    for name, ok, detail in report.checks:
        log(f"verify [{'ok' if ok else 'FAIL'}] {name}: {detail}")
    out_path = args.out or (os.path.splitext(args.problem)[0] + ".result.json")
    save_result(out_path, result, spec, log_lines)
    print(f"result written to {out_path}")
    print(f"stopped: {result.stopped} at order {result.stop_order}")
    print(f"K ({len(result.K)} generators):")
    for g in result.K:
        print("  " + poly_print(g))
    if not report.ok:
        return EXIT_CHECK_FAILED
    return EXIT_OK


def cmd_verify(args) -> int:
    spec = load_problem(args.problem)
    result = load_result(args.result, spec)
    report = verify(result, spec)
    if args.json:
        print(
            json.dumps(
                {"ok": report.ok, "checks": [
                    {"name": n, "ok": ok, "detail": d} for n, ok, d in report.checks
                ]},
                indent=1,
            )
        )
    else:
        for name, ok, detail in report.checks:
            print(f"[{'ok' if ok else 'FAIL'}] {name}: {detail}")
    return EXIT_OK if report.ok else EXIT_CHECK_FAILED


def cmd_limit(args) -> int:
    spec = load_problem(args.problem)
    n_tuple = [int(x) for x in args.psg.split(",")]
    columns = getattr(spec, "psg_columns", None)
    if columns is None:
        raise SpecValidationError(
            "problem file needs psg_columns (column index per variable) for limits"
        )
    if max(columns) >= len(n_tuple):
        raise SpecValidationError("psg tuple shorter than the column indices used")
    a = psg_column_weights(n_tuple, columns)
    print(f"per-variable weights: {a}", file=sys.stderr)
    limit = flat_limit(spec.ideal_gens, a)
    payload = {"psg": n_tuple, "weights": a, "limit": [poly_print(g) for g in limit]}
    key = ",".join(str(x) for x in n_tuple)
    target = getattr(spec, "limit_targets", {}).get(key)
    status = EXIT_OK
    if target is not None:
        target_polys = [poly_parse(s, spec.vars) for s in target]
        same = ideal_equal(limit, target_polys)
        payload["target_matched"] = same
        if not same:
            status = EXIT_CHECK_FAILED
    if args.json:
        print(json.dumps(payload, indent=1))
    else:
        for g in payload["limit"]:
            print(g)
        if target is not None:
            print(f"target ideal matched: {payload['target_matched']}")
    return status


def cmd_fiber(args) -> int:
    spec = load_problem(args.problem)
    result = load_result(args.result, spec)
    if not spec.invariants:
        raise SpecValidationError("problem file declares no invariants")
    k0 = fiber_over_zero(result, spec.invariants, spec)
    try:
        dim = krull_dimension(k0) if k0 else result.t_ring.nvars
    except UnitIdeal:
        dim = None
    if args.json:
        print(
            json.dumps(
                {"K0": [poly_print(g) for g in k0], "dimension": dim}, indent=1
            )
        )
    else:
        print(f"K0 ({len(k0)} generators), dimension {dim}:")
        for g in k0:
            print("  " + poly_print(g))
    return EXIT_OK


def cmd_analyze(args) -> int:
    vars, gens, weights = load_ideal_file(args.ideal)
    if args.weights:
        weights = [int(x) for x in args.weights.split(",")]
    if weights is None:
        weights = list(vars.gm_weights)
    gens = [g for g in gens if g.terms]
    if gens:
        dim = krull_dimension(gens)
        numerator = weighted_hilbert_series(gens, weights)
    else:
        dim = vars.nvars
        from .groebner import hilbert_numerator_zero_ideal

        numerator = hilbert_numerator_zero_ideal()
    if args.json:
        print(
            json.dumps(
                {
                    "dimension": dim,
                    "hilbert_numerator": poly_print(numerator),
                    "weights": list(weights),
                },
                indent=1,
            )
        )
    else:
        print(f"krull dimension: {dim}")
        print(f"hilbert numerator: {poly_print(numerator)}")
        print(f"denominator weights: {list(weights)}")
    return EXIT_OK


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    handlers = {
        "tangent": cmd_tangent,
        "deform": cmd_deform,
        "verify": cmd_verify,
        "limit": cmd_limit,
        "fiber": cmd_fiber,
        "analyze": cmd_analyze,
    }
    try:
        return handlers[args.command](args)
    except (SpecValidationError, ActionError, FileNotFoundError, json.JSONDecodeError,
            UnitIdeal, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    except ResourceCapError as exc:
        print(f"resource cap: {exc}", file=sys.stderr)
        return EXIT_RESOURCE
    except InternalInvariantError as exc:
        print(f"internal invariant breach: {exc}", file=sys.stderr)
        return EXIT_INTERNAL


if __name__ == "__main__":
    sys.exit(main())
