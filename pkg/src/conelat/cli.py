"""``conelat`` command line.

Spaces and operators are JSON (a file path or an inline object).  Vectors are
comma-separated decimals or JSON arrays; write ``--x=-1,0,0`` when the first
entry is negative.  Output is sorted, indented JSON on stdout.

Exit codes: 0 success, 1 bad input or unknown case (or a failed conformance
run), 2 infeasible problem, 3 solver hit its iteration cap.
"""
from __future__ import annotations

import argparse
import json
import math
import os
import sys

import numpy as np

from . import harness
from .lattice import identity_suite, random_triples
from .metrics import (
    Flavor,
    PropertyFlavor,
    conormality_constant_estimate,
    normality_check,
    regularity_classify,
    sample_normality_items,
)
from .operators import OperatorMatrix, operator_norm_estimate, operator_positive, positively_attained_check
from .solver import GridSpec, SolverOptions, Status, brute_force_quasi_sup, quasi_sup
from .spaces import space_from_dict

EXIT_OK, EXIT_INPUT, EXIT_INFEASIBLE, EXIT_MAX_ITER = 0, 1, 2, 3


class InputError(ValueError):
    pass


class _Parser(argparse.ArgumentParser):
    # usage errors share the exit code of every other input error
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_INPUT, f"{self.prog}: error: {message}\n")


def _load_json(text: str, what: str):
    src = text.strip()
    try:
        if src.startswith(("{", "[")):
            return json.loads(src)
        with open(text) as fh:
            return json.load(fh)
    except OSError as err:
        raise InputError(f"cannot read {what}: {err}") from err
    except json.JSONDecodeError as err:
        raise InputError(f"malformed JSON in {what}: {err}") from err


def parse_vector(text) -> np.ndarray:
    if isinstance(text, (list, tuple)):
        vals = text
    else:
        s = str(text).strip()
        try:
            vals = json.loads(s) if s.startswith("[") else [float(v) for v in s.split(",") if v.strip()]
        except (ValueError, json.JSONDecodeError) as err:
            raise InputError(f"cannot parse vector {text!r}") from err
    try:
        v = np.array(vals, dtype=float)
    except (TypeError, ValueError) as err:
        raise InputError(f"cannot parse vector {text!r}") from err
    if v.ndim != 1 or v.size == 0 or not np.all(np.isfinite(v)):
        raise InputError(f"vector must be a non-empty list of finite numbers: {text!r}")
    return v


def _space(text):
    try:
        return space_from_dict(_load_json(text, "space"))
    except InputError:
        raise
    except (ValueError, TypeError, KeyError) as err:
        raise InputError(f"invalid space: {err}") from err


def _operator(text):
    try:
        return OperatorMatrix.from_dict(_load_json(text, "operator"))
    except InputError:
        raise
    except (ValueError, TypeError, KeyError) as err:
        raise InputError(f"invalid operator: {err}") from err


def _vec_in(space, text, name):
    v = parse_vector(text)
    if v.size != space.dim:
        raise InputError(f"{name} has length {v.size}, the space has dimension {space.dim}")
    return v


def _seed(args) -> int:
    if args.seed is not None:
        return args.seed
    env = os.environ.get("CONELAT_SEED")
    if env is None:
        return 0
    try:
        return int(env)
    except ValueError as err:
        raise InputError(f"CONELAT_SEED must be an integer, got {env!r}") from err


def _options(args) -> SolverOptions:
    d = {}
    if getattr(args, "options", None):
        d.update(_load_json(args.options, "options"))
    if getattr(args, "method", None):
        d["method"] = args.method
    if args.seed is not None or "seed" not in d:
        d["seed"] = _seed(args)
    try:
        return SolverOptions.from_dict(d)
    except (ValueError, TypeError) as err:
        raise InputError(f"invalid options: {err}") from err


_PROBLEM_KEYS = {"space", "operation", "x", "y", "options"}


def _problem(args, operation):
    """Space, vectors and options from ``--problem`` or the inline flags."""
    if args.problem:
        doc = _load_json(args.problem, "problem")
        if not isinstance(doc, dict):
            raise InputError("problem file must be a JSON object")
        extra = set(doc) - _PROBLEM_KEYS
        if extra:
            raise InputError(f"unknown problem keys: {sorted(extra)}")
        if doc.get("operation", operation) != operation:
            raise InputError(f"problem is for {doc['operation']!r}, not {operation!r}")
        if "space" not in doc:
            raise InputError("problem needs a 'space'")
        try:
            space = space_from_dict(doc["space"])
        except (ValueError, TypeError, KeyError) as err:
            raise InputError(f"invalid space: {err}") from err
        x = doc.get("x", args.x)
        y = doc.get("y", getattr(args, "y", None))
        if "options" in doc:
            args.options = json.dumps(doc["options"])
    else:
        if not args.space:
            raise InputError("need --space or --problem")
        space, x, y = _space(args.space), args.x, getattr(args, "y", None)
    if x is None:
        raise InputError("missing x")
    xv = _vec_in(space, x, "x")
    yv = None if y is None else _vec_in(space, y, "y")
    return space, xv, yv, _options(args)


def _status_code(status: Status) -> int:
    if status is Status.INFEASIBLE:
        return EXIT_INFEASIBLE
    if status is Status.MAX_ITER:
        return EXIT_MAX_ITER
    return EXIT_OK


# ---------------------------------------------------------------------------
# commands


def cmd_quasisup(args):
    space, x, y, opts = _problem(args, "quasisup")
    if y is None:
        raise InputError("missing y")
    r = quasi_sup(space, x, y, opts)
    return {"x": x.tolist(), "y": y.tolist(), "options": opts.to_dict(), "result": r.to_dict()}, _status_code(r.status)


def cmd_abs(args):
    space, x, _, opts = _problem(args, "abs")
    r = quasi_sup(space, -x, x, opts)
    return {"x": x.tolist(), "options": opts.to_dict(), "abs": r.to_dict()}, _status_code(r.status)


def cmd_posneg(args):
    space, x, _, opts = _problem(args, "posneg")
    zero = np.zeros_like(x)
    p, m = quasi_sup(space, zero, x, opts), quasi_sup(space, zero, -x, opts)
    code = max(_status_code(p.status), _status_code(m.status))
    return {"x": x.tolist(), "options": opts.to_dict(), "pos": p.to_dict(), "neg": m.to_dict()}, code


def cmd_oracle(args):
    space, x, y, _ = _problem(args, "oracle")
    if y is None:
        raise InputError("missing y")
    if space.dim > 4:
        raise InputError("the grid oracle handles dimension <= 4")
    r = brute_force_quasi_sup(space, x, y, GridSpec(points=args.points, levels=args.levels))
    return {"x": x.tolist(), "y": y.tolist(), "result": r.to_dict()}, _status_code(r.status)


def _flavor(text, conormal):
    try:
        f = Flavor(text)
    except ValueError as err:
        raise InputError(f"unknown flavor {text!r}") from err
    if f.is_conormal != conormal:
        raise InputError(f"{text} is not a {'conormality' if conormal else 'normality'} flavor")
    return f


def _positive_alpha(a):
    if a is None or not a > 0 or not math.isfinite(a):
        raise InputError("--alpha must be a positive number")
    return a


def check_identities(args, seed):
    space = _space(_require(args.space, "--space"))
    worst, failed, inapplicable = 0.0, {}, 0
    for i, (x, y, z) in enumerate(random_triples(space, args.samples, seed)):
        rep = identity_suite(space, x, y, z, args.tol)
        if not rep.applicable:
            inapplicable += 1
            continue
        worst = max(worst, rep.max_violation)
        for rec in rep.records:
            if not rec.passed:
                failed.setdefault(rec.name, i)
    out = {
        "samples": args.samples,
        "tol": args.tol,
        "max_violation": worst,
        "failed_identities": failed,
        "inapplicable": inapplicable,
        "pass": not failed and inapplicable == 0,
    }
    return out, EXIT_OK


def check_normality(args, seed):
    space = _space(_require(args.space, "--space"))
    kind = _flavor(_require(args.flavor, "--flavor"), conormal=False)
    pf = PropertyFlavor(kind, _positive_alpha(args.alpha))
    rep = normality_check(space, pf, sample_normality_items(space, kind, args.samples, seed), args.tol)
    return rep.to_dict(), EXIT_OK


def check_conormality(args, seed):
    space = _space(_require(args.space, "--space"))
    kind = _flavor(_require(args.flavor, "--flavor"), conormal=True)
    est = conormality_constant_estimate(space, kind, args.samples, seed)
    out = {"flavor": kind.value, "constant_estimate": est, "samples": args.samples,
           "note": "largest sampled decomposition ratio; a lower bound for the best constant"}
    if args.alpha is not None:
        out["alpha"] = args.alpha
        out["within_alpha"] = bool(est <= args.alpha * (1 + 1e-6) + 1e-6)
    return out, EXIT_OK


def check_regularity(args, seed):
    space = _space(_require(args.space, "--space"))
    rep = regularity_classify(space, _positive_alpha(args.alpha), args.samples, seed)
    return rep.to_dict(), EXIT_OK


def check_operator(args, seed):
    T = _operator(_require(args.op, "--op"))
    pos = operator_positive(T, tol=args.tol, seed=seed)
    est = operator_norm_estimate(T, seed=seed)
    return {"positivity": pos.to_dict(), "operator_norm": est.to_dict()}, EXIT_OK


def check_attained(args, seed):
    T = _operator(_require(args.op, "--op"))
    tol = 1e-4 if args.tol is None else args.tol
    try:
        rep = positively_attained_check(T, tol=tol, n_samples=args.samples, seed=seed)
    except ValueError as err:
        raise InputError(str(err)) from err
    return rep.to_dict(), EXIT_OK


CHECKS = {
    "identities": check_identities,
    "normality": check_normality,
    "conormality": check_conormality,
    "regularity": check_regularity,
    "operator": check_operator,
    "attained": check_attained,
}


def _require(v, flag):
    if v is None:
        raise InputError(f"{flag} is required")
    return v


def cmd_check(args):
    seed = _seed(args)
    if args.tol is None and args.kind != "attained":
        args.tol = 1e-6 if args.kind == "identities" else 1e-9
    out, code = CHECKS[args.kind](args, seed)
    out = {"check": args.kind, "seed": seed, "report": out}
    return out, code


def cmd_reproduce(args):
    seed = _seed(args)
    if args.all:
        rep = harness.run_all(seed, properties=not args.examples_only)
    else:
        if not args.case:
            raise InputError("need --case or --all")
        unknown = [c for c in args.case if c not in harness.REGISTRY]
        if unknown:
            raise InputError(f"unknown case: {', '.join(unknown)}")
        rep = harness.ConformanceReport(seed, [harness.run_example(c, seed) for c in args.case])
    return rep.to_dict(timings=not args.no_timings), rep.exit_code


# ---------------------------------------------------------------------------
# parser


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="conelat", description="Quasi-lattice computations on ordered spaces.")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def problem_flags(sp, with_y=True):
        sp.add_argument("--problem", help="problem JSON (file or inline)")
        sp.add_argument("--space", help="space JSON (file or inline)")
        sp.add_argument("--x", help="vector, e.g. 0,0,2 or [0,0,2]")
        if with_y:
            sp.add_argument("--y", help="vector")
        sp.add_argument("--options", help="solver options JSON")
        sp.add_argument("--method", choices=["auto", "closed_form", "splitting"])
        sp.add_argument("--seed", type=int, help="restart seed (default: $CONELAT_SEED or 0)")

    q = sub.add_parser("quasisup", help="quasi-supremum of x and y")
    problem_flags(q)
    q.set_defaults(func=cmd_quasisup)
    a = sub.add_parser("abs", help="quasi-absolute value of x")
    problem_flags(a, with_y=False)
    a.set_defaults(func=cmd_abs)
    pn = sub.add_parser("posneg", help="positive and negative parts of x")
    problem_flags(pn, with_y=False)
    pn.set_defaults(func=cmd_posneg)
    o = sub.add_parser("oracle", help="brute-force grid search (dimension <= 4)")
    problem_flags(o)
    o.add_argument("--points", type=int, default=81)
    o.add_argument("--levels", type=int, default=10)
    o.set_defaults(func=cmd_oracle)

    c = sub.add_parser("check", help="sampled property checks")
    c.add_argument("kind", choices=sorted(CHECKS))
    c.add_argument("--space")
    c.add_argument("--op", help="operator JSON (file or inline)")
    c.add_argument("--flavor")
    c.add_argument("--alpha", type=float)
    c.add_argument("--samples", type=int, default=100)
    c.add_argument("--seed", type=int)
    c.add_argument("--tol", type=float)
    c.set_defaults(func=cmd_check)

    r = sub.add_parser("reproduce", help="run the conformance harness")
    g = r.add_mutually_exclusive_group()
    g.add_argument("--case", action="append", help="case id (repeatable)")
    g.add_argument("--all", action="store_true")
    r.add_argument("--examples-only", action="store_true", help="with --all: skip the property suites")
    r.add_argument("--no-timings", action="store_true", help="omit runtimes for byte-stable output")
    r.add_argument("--seed", type=int)
    r.set_defaults(func=cmd_reproduce)
    return p


def _clean(obj):
    """Replace non-finite floats by ``None`` so the output is strict JSON."""
    if isinstance(obj, dict):
        return {str(k): _clean(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_clean(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return _clean(obj.tolist())
    if isinstance(obj, (np.floating, float)):
        v = float(obj)
        return v if math.isfinite(v) else None
    if isinstance(obj, np.integer):
        return int(obj)
    if isinstance(obj, np.bool_):
        return bool(obj)
    return obj


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        out, code = args.func(args)
    except InputError as err:
        print(f"error: {err}", file=sys.stderr)
        return EXIT_INPUT
    sys.stdout.write(json.dumps(_clean(out), indent=2, sort_keys=True, allow_nan=False) + "\n")
    return code


if __name__ == "__main__":
    sys.exit(main())
