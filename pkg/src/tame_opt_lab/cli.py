"""Command line front end: ``tame-opt-lab {solve,diagnose,survey,probe,fixtures}``.

Exit codes: 0 success, 1 input error, 2 convergence or numerical failure,
3 verdict other than identifiable under ``--expect identifiable``.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path

import numpy as np

from . import tolerances as tol
from .body import FIXTURE_NAMES, fixture, fixture_document, load
from .errors import InputError, NoInteriorError, TameOptError
from .harness import DiagnoseOptions, diagnose, emit_report, path_probe, survey
from .identify import ProbeOptions
from .solver import SolverOptions, maximize_linear

EXIT_OK, EXIT_INPUT, EXIT_NUMERIC, EXIT_VERDICT = 0, 1, 2, 3


def _vector(text):
    try:
        return np.array([float(t) for t in text.split(",")])
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}") from exc


def _body(args):
    if args.body and args.fixture:
        raise InputError("give either --body or --fixture, not both")
    if args.fixture:
        return fixture(args.fixture)
    if args.body:
        try:
            text = Path(args.body).read_text()
        except OSError as exc:
            raise InputError(f"cannot read body file: {exc}") from exc
        return load(text)
    raise InputError("one of --body or --fixture is required")


def _solver_opts(args):
    over = {}
    if args.gap is not None:
        over["gap_target"] = args.gap
    if args.max_iters is not None:
        over["max_newton_iters"] = args.max_iters
    return SolverOptions(**over)


def _diag_opts(args, **extra):
    return DiagnoseOptions(solver=_solver_opts(args), probe=ProbeOptions(seed=args.seed), seed=args.seed, **extra)


def _write(args, text):
    if args.out:
        Path(args.out).write_text(text if text.endswith("\n") else text + "\n")
    else:
        sys.stdout.write(text if text.endswith("\n") else text + "\n")


def _need_c(args, n):
    if args.c is None:
        raise InputError("--c is required")
    if args.c.shape != (n,):
        raise InputError(f"--c has {args.c.size} entries, body dimension is {n}")
    return args.c


def cmd_solve(args):
    body = _body(args)
    res = maximize_linear(body, _need_c(args, body.n), _solver_opts(args))
    _write(args, json.dumps({"schema": tol.SCHEMA, "kind": "solve", **res.summary()}, indent=2))
    return EXIT_OK


def cmd_diagnose(args):
    body = _body(args)
    rep = diagnose(body, _need_c(args, body.n), _diag_opts(args, sensitivity=args.sensitivity))
    _write(args, emit_report(rep, args.format))
    if args.expect == "identifiable" and rep.overall != "identifiable":
        return EXIT_VERDICT
    return EXIT_OK


def cmd_survey(args):
    body = _body(args)
    stats = survey(body, args.samples, args.seed, _diag_opts(args), workers=args.workers)
    _write(args, emit_report(stats, args.format))
    return EXIT_OK


def cmd_probe(args):
    body = _body(args)
    if args.c_from is None or args.c_to is None:
        raise InputError("--from and --to are required")
    res = path_probe(body, args.c_from, args.c_to, args.steps, _diag_opts(args))
    _write(args, json.dumps(res.to_dict(), indent=2))
    return EXIT_OK


def cmd_fixtures(args):
    if args.action == "list":
        _write(args, "\n".join(FIXTURE_NAMES))
    else:
        if not args.name:
            raise InputError("fixtures dump needs a fixture name")
        _write(args, json.dumps(fixture_document(args.name), indent=2))
    return EXIT_OK


def build_parser():
    p = argparse.ArgumentParser(prog="tame-opt-lab",
                                description="Linear optimization over convex semi-algebraic bodies "
                                            "with identifiability diagnostics.")
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp, c=True):
        sp.add_argument("--body", help="body JSON file")
        sp.add_argument("--fixture", choices=FIXTURE_NAMES)
        if c:
            sp.add_argument("--c", type=_vector, help="objective, comma separated")
        sp.add_argument("--seed", type=int, default=0)
        sp.add_argument("--gap", type=float, help="duality gap target")
        sp.add_argument("--max-iters", type=int, help="Newton iterations per centering")
        sp.add_argument("--out", help="write output here instead of stdout")

    sp = sub.add_parser("solve", help="maximize <c, x> over the body")
    common(sp)
    sp.set_defaults(func=cmd_solve)

    sp = sub.add_parser("diagnose", help="identifiability verdict at c")
    common(sp)
    sp.add_argument("--format", choices=("json", "csv"), default="json")
    sp.add_argument("--expect", choices=("identifiable",))
    sp.add_argument("--sensitivity", action="store_true", help="also compare Jacobians")
    sp.set_defaults(func=cmd_diagnose)

    sp = sub.add_parser("survey", help="diagnose seeded random directions")
    common(sp, c=False)
    sp.add_argument("--samples", type=int, default=500)
    sp.add_argument("--format", choices=("json", "csv"), default="json")
    sp.add_argument("--workers", type=int, default=1)
    sp.set_defaults(func=cmd_survey)

    sp = sub.add_parser("probe", help="diagnose along a great circle")
    common(sp, c=False)
    sp.add_argument("--from", dest="c_from", type=_vector)
    sp.add_argument("--to", dest="c_to", type=_vector)
    sp.add_argument("--steps", type=int, default=101)
    sp.set_defaults(func=cmd_probe)

    sp = sub.add_parser("fixtures", help="list or dump built-in bodies")
    sp.add_argument("action", choices=("list", "dump"))
    sp.add_argument("name", nargs="?", choices=FIXTURE_NAMES)
    sp.add_argument("--out")
    sp.set_defaults(func=cmd_fixtures)
    return p


def main(argv=None):
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_OK if exc.code == 0 else EXIT_INPUT
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING)
    try:
        return args.func(args)
    except (InputError, NoInteriorError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except TameOptError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_NUMERIC


if __name__ == "__main__":
    sys.exit(main())
