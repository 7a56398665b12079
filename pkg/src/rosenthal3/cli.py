"""Command-line front end.

Exit codes: 0 success, 1 usage or parse error, 2 precondition violation,
3 verification failure (an inequality check failed; the fixture is dumped
to stderr).
"""

import argparse
import json
import math
import sys

import numpy as np

from . import __version__
from .acceptance import THRESHOLDS, run_all
from .bounds import (
    Constraints,
    PreconditionError,
    abs_cube_bound,
    corollary_bound,
    cube_plus_bound,
    mean_plus_bound,
    optimize_corollary,
    round_sig,
    theorem_bound,
)
from .function_class import F3Function, parse_literals
from .mixture import MixtureParams, mixture_expectation
from .verification import (
    DistributionSpec,
    check_conditions,
    exact_expectation,
    exact_expectation_truncated,
    extremal_spec,
    random_valid_spec,
    sum_distribution,
)

EXIT_OK, EXIT_USAGE, EXIT_PRECONDITION, EXIT_VERIFY = 0, 1, 2, 3


class UsageError(Exception):
    pass


class VerificationFailure(Exception):
    def __init__(self, message, fixture):
        super().__init__(message)
        self.fixture = fixture


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def _jsonable(obj):
    if isinstance(obj, float) and not math.isfinite(obj):
        return "inf" if obj > 0 else ("-inf" if obj < 0 else "nan")
    if isinstance(obj, dict):
        return {k: _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    return obj


def _emit(doc, fmt, out):
    doc = _jsonable({"version": __version__, **doc})
    if fmt == "structured":
        out.write(json.dumps(doc, sort_keys=True, allow_nan=False) + "\n")
        return
    for key, value in doc.items():
        if isinstance(value, dict):
            out.write(f"{key}:\n")
            for k, v in value.items():
                out.write(f"  {k}: {v}\n")
        else:
            out.write(f"{key}: {value}\n")


def _function(args, required=True):
    parts = []
    if args.f:
        parts.append(parse_literals(args.f))
    if args.f_file:
        with open(args.f_file) as fh:
            parts.append(F3Function.from_json(fh.read()))
    if not parts:
        if required:
            raise UsageError("a function is required: pass --f literal(s) or --f-file")
        return None
    f = parts[0]
    for g in parts[1:]:
        f = f + g
    return f


def cmd_bound(args):
    f = _function(args, required=args.x is None)
    results = {}
    c = Constraints(beta=args.beta, zero_means=args.sum_abs3 is not None)
    if f is not None:
        results["theorem"] = theorem_bound(f, c).to_dict()
    if args.x is not None:
        results["cube_plus"] = cube_plus_bound(args.x, c).to_dict()
        if args.sum_abs3 is not None:
            results["abs_cube"] = abs_cube_bound(args.x, args.sum_abs3, c).to_dict()
    return {"command": "bound", "results": results}


def cmd_corollary(args):
    c = Constraints(beta=args.beta)
    if args.a is None:
        a, result = optimize_corollary(args.p, c)
    else:
        a, result = args.a, corollary_bound(args.p, args.a, c)
    constant = result.parameters["constant"]
    coefficient = result.parameters["beta_coefficient"]
    return {
        "command": "corollary",
        "a": a,
        "optimized": args.a is None,
        "constant": constant,
        "beta_coefficient": coefficient,
        "rounded_constant": round_sig(constant),
        "rounded_beta_coefficient": round_sig(coefficient),
        "result": result.to_dict(),
    }


def cmd_mixture(args):
    f = _function(args)
    mp = MixtureParams(args.beta, args.y)
    result = mixture_expectation(f, mp, args.eps)
    return {
        "command": "mixture",
        "truncation_index": result.parameters["truncation_index"],
        "result": result.to_dict(),
    }


def _verify_one(spec, beta, label):
    """Run every applicable inequality on ``spec``; raise on the first violation."""
    report = check_conditions(spec, beta)
    if not report.satisfies_conditions:
        raise PreconditionError(f"{label}: spec violates the moment conditions for beta={beta}")
    values, probs = sum_distribution(spec)
    checks = 0

    def check(name, lhs, bound, tol=1e-12, **where):
        nonlocal checks
        checks += 1
        if lhs > bound + tol:
            raise VerificationFailure(
                f"{label}: {name} violated ({lhs!r} > {bound!r})",
                {"label": label, "inequality": name, "lhs": lhs, "bound": bound, "beta": beta,
                 "spec": spec.to_dict(), **where},
            )

    for x in THRESHOLDS:
        lhs = math.fsum(probs * np.maximum(values - x, 0.0) ** 3)
        check("cube_plus", lhs, cube_plus_bound(x, beta).value, x=x)
    check("mean_plus", math.fsum(probs * np.maximum(values, 0.0)), mean_plus_bound().value)

    centered = spec.centered()
    rep0 = check_conditions(centered, math.inf)
    c0 = Constraints(beta=rep0.beta_total, zero_means=True)
    cv, cp = sum_distribution(centered)
    for x in THRESHOLDS:
        lhs = math.fsum(cp * np.abs(cv - x) ** 3)
        check("abs_cube", lhs, abs_cube_bound(x, rep0.abs3_total, c0).value, x=x, centered=True)

    f = F3Function.hinge(1.0, 0.0, 3.0)
    for y in (2.0, 5.0, 10.0):
        capped = spec.truncated(y)
        beta_y = check_conditions(capped, math.inf).beta_total
        lhs = exact_expectation_truncated(spec, f, y)
        rhs = mixture_expectation(f, MixtureParams(beta_y, y), 1e-9).value
        check("mixture", lhs, rhs, tol=1e-9, y=y)
    return checks


def cmd_verify(args):
    if args.random:
        fixtures = []
        for seed in range(args.seed, args.seed + args.count):
            n_vars = args.n_vars or 1 + seed % 12
            spec, achieved = random_valid_spec(seed, n_vars, args.beta or 0.0)
            fixtures.append((f"seed={seed}", spec, max(achieved, args.beta or 0.0)))
    elif args.spec:
        with open(args.spec) as fh:
            spec = DistributionSpec.from_json(fh.read())
        beta = args.beta if args.beta is not None else check_conditions(spec, math.inf).beta_total
        fixtures = [(args.spec, spec, beta)]
    else:
        raise UsageError("verify needs --spec PATH or --random")
    checks = sum(_verify_one(spec, beta, label) for label, spec, beta in fixtures)
    return {"command": "verify", "specs": len(fixtures), "passed": len(fixtures), "checks": checks}


def cmd_extremal(args):
    ex = extremal_spec(args.beta, args.y, args.n_spikes, args.n_fillers, args.filler_scale)
    x = args.x if args.x is not None else 0.0
    f = F3Function.hinge(1.0, x, 3.0)
    value = exact_expectation(ex.spec, f)
    bound = cube_plus_bound(x, ex.effective_beta)
    if value > bound.value + 1e-12:
        raise VerificationFailure("extremal spec exceeds the cube bound", {"spec": ex.spec.to_dict()})
    return {
        "command": "extremal",
        "x": x,
        "spike_prob": ex.spike_prob,
        "spike_low": ex.spike_low,
        "filler_prob": ex.filler_prob,
        "filler_beta": ex.filler_beta,
        "effective_beta": ex.effective_beta,
        "exact_value": value,
        "bound": bound.to_dict(),
        "ratio": value / bound.value,
    }


def cmd_selftest(args):
    results = run_all(report=lambda line: sys.stderr.write(line + "\n"))
    failed = [r.number for r in results if not r.passed]
    doc = {
        "command": "selftest",
        "criteria": {str(r.number): {"name": r.name, "passed": r.passed} for r in results},
        "all_passed": not failed,
    }
    if failed:
        raise VerificationFailure(f"acceptance criteria failed: {failed}", doc)
    return doc


COMMANDS = {
    "bound": cmd_bound,
    "corollary": cmd_corollary,
    "mixture": cmd_mixture,
    "verify": cmd_verify,
    "extremal": cmd_extremal,
    "selftest": cmd_selftest,
}


def build_parser():
    parser = _Parser(prog="rosenthal3", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=__version__)
    common = _Parser(add_help=False)
    common.add_argument("--format", choices=("human", "structured"), default="human")
    common.add_argument("--seed", type=int, default=0)
    sub = parser.add_subparsers(dest="command", parser_class=_Parser)

    def fn_args(p):
        p.add_argument("--f", action="append", metavar="LITERAL",
                       help="hinge:c,t[,alpha] | exp:c,lambda | affine:a,b (repeatable, summed)")
        p.add_argument("--f-file", metavar="PATH", help="F3Function JSON document")

    p = sub.add_parser("bound", parents=[common], help="main, cube and absolute-cube bounds")
    fn_args(p)
    p.add_argument("--beta", type=float, required=True)
    p.add_argument("--x", type=float)
    p.add_argument("--sum-abs3", type=float, help="sum E|X_i|^3; enables the zero-mean bound")

    p = sub.add_parser("corollary", parents=[common], help="bound on E S_+^p, 0 < p < 3")
    p.add_argument("--p", type=float, required=True)
    p.add_argument("--a", type=float, help="omit to optimize over a")
    p.add_argument("--beta", type=float, default=0.0)

    p = sub.add_parser("mixture", parents=[common], help="finite-cap mixture bound")
    fn_args(p)
    p.add_argument("--beta", type=float, required=True)
    p.add_argument("--y", type=float, required=True)
    p.add_argument("--eps", type=float, default=1e-9)

    p = sub.add_parser("verify", parents=[common], help="soundness checks on specs")
    p.add_argument("--spec", metavar="PATH", help="DistributionSpec JSON document")
    p.add_argument("--random", action="store_true")
    p.add_argument("--count", type=int, default=10)
    p.add_argument("--n-vars", type=int)
    p.add_argument("--beta", type=float)

    p = sub.add_parser("extremal", parents=[common], help="near-extremal spike-plus-filler spec")
    p.add_argument("--beta", type=float, required=True)
    p.add_argument("--y", type=float, required=True)
    p.add_argument("--n-spikes", type=int, required=True)
    p.add_argument("--n-fillers", type=int, required=True)
    p.add_argument("--filler-scale", type=float, required=True)
    p.add_argument("--x", type=float)

    sub.add_parser("selftest", parents=[common], help="run every acceptance criterion")
    return parser


def main(argv=None, out=None, err=None):
    out = out or sys.stdout
    err = err or sys.stderr
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        if args.command is None:
            raise UsageError("a subcommand is required")
        doc = COMMANDS[args.command](args)
    except SystemExit as exc:  # --help / --version
        return exc.code or EXIT_OK
    except UsageError as exc:
        err.write(f"usage error: {exc}\n")
        return EXIT_USAGE
    except PreconditionError as exc:
        err.write(f"precondition violated: {exc}\n")
        return EXIT_PRECONDITION
    except VerificationFailure as exc:
        err.write(f"verification failed: {exc}\n")
        err.write(json.dumps(_jsonable(exc.fixture), sort_keys=True) + "\n")
        return EXIT_VERIFY
    except (ValueError, OSError) as exc:
        err.write(f"usage error: {exc}\n")
        return EXIT_USAGE
    _emit(doc, args.format, out)
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
