"""``ldl`` command-line frontend.

Every subcommand reads JSON files (or standard input where noted), writes JSON
or CSV to ``--out`` or standard output, and reports errors as one JSON object
on standard error. Exit codes: 0 success (a non-member verdict is a success),
1 usage or input error, 2 infeasible efficiencies, 3 resource cap.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from fractions import Fraction

import numpy as np

from . import __version__
from .errors import LdlError
from .geometry import MembershipProblem, check_membership, critical_eta_min
from .inequality import eq5_region, eval_eq5
from .model import postselect, to_number, validate
from .quantum import ProjectiveSetting, TwoQubitState, born_correlation, hardy_point
from .schemes import SchemeParams, apply_scheme, ldl_to_mdl, mdl_nonlocality_condition
from .serialization import (
    bounds_from_json,
    correlation_from_json,
    effs_from_json,
    format_output,
    scenario_from_json,
)
from .vertices import DEFAULT_CAP, enumerate_ldl_vertices


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def _load(path):
    if path is None or path == "-":
        text = sys.stdin.read()
    else:
        with open(path, encoding="utf-8") as fh:
            text = fh.read()
    return json.loads(text)


def _emit(text: str, out):
    if out:
        with open(out, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _postselected(doc):
    corr = correlation_from_json(doc)
    if corr.full:
        corr, _ = postselect(corr)
    return corr


def _number(text):
    try:
        return to_number(text)
    except (ValueError, ZeroDivisionError) as exc:
        raise argparse.ArgumentTypeError(f"not a number: {text!r}") from exc


def cmd_vertices(args):
    sc = scenario_from_json(_load(args.scenario))
    bounds = bounds_from_json(_load(args.bounds), sc.n_parties)
    return enumerate_ldl_vertices(sc, bounds, args.cap)


def cmd_membership(args):
    target = _postselected(_load(args.target))
    effs = effs_from_json(_load(args.effs), target.scenario)
    bounds = bounds_from_json(_load(args.bounds), target.scenario.n_parties)
    problem = MembershipProblem(target, effs, bounds, cap=args.cap)
    exact = True if args.exact else None
    return check_membership(problem, tol=args.tol, exact=exact, seed=args.seed)


def cmd_eq5(args):
    target = _postselected(_load(args.target))
    return eval_eq5(target, args.eta_min, args.eta_max, args.tol if args.tol_given else None)


def cmd_eq5_region(args):
    target = _postselected(_load(args.target))
    return eq5_region(target, args.grid, args.tol if args.tol_given else None)


def cmd_hardy(args):
    return born_correlation(*hardy_point(args.tau))


def _amp(v):
    if isinstance(v, list):
        return complex(float(v[0]), float(v[1]))
    return complex(float(v))


def cmd_born(args):
    sdoc = _load(args.state)
    state = TwoQubitState.normalized([_amp(v) for v in sdoc["amplitudes"]])
    mdoc = _load(args.settings)
    alice = ProjectiveSetting(tuple(tuple(p) for p in mdoc["alice"]))
    bob = ProjectiveSetting(tuple(tuple(p) for p in mdoc["bob"]))
    return born_correlation(state, alice, bob)


def _local(path, n, m):
    if path is None:
        return np.full((n, m), Fraction(1, m), dtype=object)
    doc = _load(path)
    rows = doc["dist"] if isinstance(doc, dict) else doc
    return [[to_number(v) if isinstance(v, str) else (Fraction(v) if isinstance(v, int) else v) for v in r]
            for r in rows]


def cmd_scheme(args):
    p = _postselected(_load(args.input))
    sc = p.scenario
    params = SchemeParams(
        args.eta,
        args.assign,
        _local(args.local_a, sc.inputs[0], sc.outcomes[0]),
        _local(args.local_b, sc.inputs[1], sc.outcomes[1]),
    )
    return apply_scheme(p, params, args.tol)


def cmd_mdl_map(args):
    res = ldl_to_mdl(args.l, args.h, args.eta_min, args.eta_max, joint=args.joint, n_inputs=args.n_inputs)
    cond = mdl_nonlocality_condition(args.eta_min, args.eta_max, args.n_inputs, args.l, args.h)
    return res, args.joint, cond


def cmd_validate(args):
    corr = correlation_from_json(_load(args.input))
    return validate(corr, args.tol)


def cmd_critical(args):
    target = _postselected(_load(args.target))
    effs = effs_from_json(_load(args.effs), target.scenario)
    val = critical_eta_min(
        target, effs, args.eta_max, tol=args.step, lp_tol=args.tol, exact=args.exact, seed=args.seed
    )
    return val, args.eta_max, args.step


def build_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    common.add_argument("--tol", type=float, default=None, help="numeric tolerance (default 1e-9)")
    common.add_argument("--exact", action="store_true", help="force exact rational arithmetic")
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--cap", type=int, default=DEFAULT_CAP, help="vertex enumeration cap")
    common.add_argument("--out", default=None, help="output path (default: standard output)")

    parser = _Parser(prog="ldl", description="Limited-detection-local correlation toolkit")
    parser.add_argument("--version", action="version", version=f"ldl {__version__}")
    sub = parser.add_subparsers(dest="command", parser_class=_Parser)
    sub.required = True

    p = sub.add_parser("vertices", parents=[common], help="enumerate LDL product vertices")
    p.add_argument("--scenario", required=True)
    p.add_argument("--bounds", required=True)
    p.set_defaults(func=cmd_vertices)

    p = sub.add_parser("membership", parents=[common], help="LP membership test with certificate")
    p.add_argument("--target")
    p.add_argument("--effs", required=True)
    p.add_argument("--bounds", required=True)
    p.set_defaults(func=cmd_membership)

    p = sub.add_parser("eq5", parents=[common], help="evaluate the explicit LDL inequality")
    p.add_argument("--target")
    p.add_argument("--eta-min", type=_number, required=True)
    p.add_argument("--eta-max", type=_number, required=True)
    p.set_defaults(func=cmd_eq5)

    p = sub.add_parser("eq5-region", parents=[common], help="sweep the inequality over (eta_min, eta_max)")
    p.add_argument("--target")
    p.add_argument("--grid", type=int, default=200)
    p.set_defaults(func=cmd_eq5_region)

    p = sub.add_parser("hardy", parents=[common], help="Hardy-paradox quantum correlation")
    p.add_argument("--tau", type=float, default=0.5)
    p.set_defaults(func=cmd_hardy)

    p = sub.add_parser("born", parents=[common], help="Born-rule correlation of a two-qubit state")
    p.add_argument("--state", required=True)
    p.add_argument("--settings", required=True)
    p.set_defaults(func=cmd_born)

    p = sub.add_parser("scheme", parents=[common], help="partial assignment of lost events")
    p.add_argument("--input")
    p.add_argument("--eta", type=_number, required=True)
    p.add_argument("--assign", type=_number, required=True)
    p.add_argument("--local-a")
    p.add_argument("--local-b")
    p.set_defaults(func=cmd_scheme)

    p = sub.add_parser("mdl-map", parents=[common], help="map detection bounds to measurement dependence")
    p.add_argument("--l", type=_number, required=True)
    p.add_argument("--h", type=_number, required=True)
    p.add_argument("--eta-min", type=_number, required=True)
    p.add_argument("--eta-max", type=_number, required=True)
    p.add_argument("--joint", action="store_true")
    p.add_argument("--n-inputs", type=int, default=2)
    p.set_defaults(func=cmd_mdl_map)

    p = sub.add_parser("validate", parents=[common], help="check nonnegativity and normalization")
    p.add_argument("--input")
    p.set_defaults(func=cmd_validate)

    p = sub.add_parser("critical-eta", parents=[common], help="bisect the rejection threshold in eta_min")
    p.add_argument("--target")
    p.add_argument("--effs", required=True)
    p.add_argument("--eta-max", type=_number, default=Fraction(1))
    p.add_argument("--step", type=float, default=1e-3, help="bisection resolution")
    p.set_defaults(func=cmd_critical)
    return parser


_INPUT_FLAGS = ("scenario", "bounds", "target", "effs", "input", "state", "settings", "local_a", "local_b")


def _check_paths(args):
    if args.out is None:
        return
    for name in _INPUT_FLAGS:
        path = getattr(args, name, None)
        if path is not None and os.path.abspath(path) == os.path.abspath(args.out):
            raise UsageError(f"--out would overwrite the input given to --{name.replace('_', '-')}")


def _fail(code: int, doc: dict) -> int:
    sys.stderr.write(json.dumps(doc) + "\n")
    return code


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        args.tol_given = args.tol is not None
        if args.tol is None:
            args.tol = 1e-9
        if args.tol <= 0:
            raise UsageError("--tol must be positive")
        _check_paths(args)
        _emit(format_output(args.command, args.func(args)), args.out)
    except UsageError as exc:
        return _fail(1, {"error": "UsageError", "message": str(exc)})
    except LdlError as exc:
        return _fail(exc.exit_code, exc.to_dict())
    except (OSError, ValueError, KeyError, TypeError, ZeroDivisionError) as exc:
        return _fail(1, {"error": type(exc).__name__, "message": str(exc)})
    return 0


if __name__ == "__main__":
    sys.exit(main())
