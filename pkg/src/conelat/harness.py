"""Conformance harness: worked examples, property suites and oracle comparisons.

Every case returns a :class:`CaseReport` with one deviation per check.  A
deviation is a non-negative number compared against the check's tolerance;
boolean facts are recorded as ``0.0`` (holds) or ``1.0`` (fails) against a
tolerance of ``0``.  Irrational reference values are computed from their
closed forms when a case runs.
"""
from __future__ import annotations

import math
import time
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .lattice import identity_suite, random_triples
from .metrics import PropertyFlavor, normality_check, weighted_cone_witness
from .operators import (
    absolute_monotonicity_experiment,
    positively_attained_check,
    random_positive_operator,
)
from .solver import (
    GridSpec,
    SolverOptions,
    Status,
    brute_force_quasi_sup,
    is_minimal_upper_bound,
    quasi_sup,
    sigma,
)
from .spaces import (
    four_ray_space,
    half_lorentz_space,
    lorentz_space,
    order_leq,
    order_residual,
    polynomial_space,
    standard_space,
    weighted_space,
)

PAPER, DERIVED = "paper", "derived"


@dataclass
class Check:
    name: str
    deviation: float
    tol: float
    measured: float | None = None

    @property
    def passed(self) -> bool:
        return bool(self.deviation <= self.tol)


@dataclass
class CaseReport:
    case_id: str
    tag: str
    checks: list = field(default_factory=list)
    runtime_ms: float = 0.0
    error: str = ""

    @property
    def passed(self) -> bool:
        return not self.error and all(c.passed for c in self.checks)

    @property
    def deviations(self) -> dict:
        return {c.name: c.deviation for c in self.checks}

    def to_dict(self):
        return {
            "case_id": self.case_id,
            "tag": self.tag,
            "pass": self.passed,
            "deviations": {c.name: _finite(c.deviation) for c in self.checks},
            "tolerances": {c.name: c.tol for c in self.checks},
            "measured": {c.name: _finite(c.measured) for c in self.checks if c.measured is not None},
            "failed": [c.name for c in self.checks if not c.passed],
            "runtime_ms": round(self.runtime_ms, 3),
            "error": self.error,
        }


def _finite(v):
    v = float(v)
    return v if math.isfinite(v) else None


class _Recorder:
    def __init__(self):
        self.checks = []

    def close(self, name, value, expected, tol):
        dev = float(np.max(np.abs(np.asarray(value, float) - np.asarray(expected, float))))
        self.checks.append(Check(name, dev if math.isfinite(dev) else math.inf, tol))

    def fact(self, name, ok):
        self.checks.append(Check(name, 0.0 if ok else 1.0, 0.0))

    def above(self, name, value, floor):
        """Passes when ``value > floor``; the deviation is the shortfall."""
        short = 0.0 if value > floor else float(floor - value) + 1e-300
        self.checks.append(Check(name, short, 0.0, float(value)))


@dataclass
class ExampleCase:
    id: str
    title: str
    tag: str
    tol: float
    run: Callable


def _oracle_check(rec, space, x, y, z, name="oracle"):
    o = brute_force_quasi_sup(space, x, y, GridSpec())
    rec.checks.append(Check(f"{name}-position", float(np.linalg.norm(o.z - z)), 2 * o.grid_step))


# ---------------------------------------------------------------------------
# registered examples


def _ex_5_10(rec, tol, seed):
    sp = lorentz_space(3)
    x, y = np.zeros(3), np.array([0.0, 0.0, 2.0])
    expected = np.array([1.0, 0.0, 1.0])
    for method in ("closed_form", "splitting"):
        r = quasi_sup(sp, x, y, SolverOptions(method=method))
        rec.close(f"sup-{method}", r.z, expected, tol)
        rec.fact(f"unique-{method}", r.status is Status.UNIQUE)
    for t in (0.5, 1.0, 2.0):
        for sgn in (1.0, -1.0):
            z = np.array([math.sqrt(t * t + 1), sgn * t, 1.0])
            tag = f"t={t:+g}" if sgn > 0 else f"t={-t:+g}"
            rec.fact(f"hyperbola-upper-bound[{tag}]", order_leq(sp, x, z) and order_leq(sp, y, z))
            rec.fact(f"hyperbola-incomparable[{tag}]", not order_leq(sp, expected, z) and not order_leq(sp, z, expected))
    _oracle_check(rec, sp, x, y, expected)


def _flat_checks(rec, sp, x, y, tol):
    r = quasi_sup(sp, x, y)
    rec.fact("flat-minimum", r.status is Status.FLAT_MINIMUM)
    rec.fact("two-witnesses", len(r.witnesses) >= 2)
    for i, w in enumerate(r.witnesses):
        rec.close(f"witness-sigma[{i}]", sigma(x, y, w, sp.norm), 2.0, tol)
        rec.checks.append(Check(f"witness-upper-bound[{i}]", max(order_residual(sp, x, w), order_residual(sp, y, w)), 1e-7))
    o = brute_force_quasi_sup(sp, x, y, GridSpec())
    rec.fact("oracle-flat-minimum", o.status is Status.FLAT_MINIMUM)
    return r


def _ex_5_6(rec, tol, seed):
    sp = standard_space(3, math.inf)
    x, y = np.array([1.0, -1.0, 0.0]), np.zeros(3)
    _flat_checks(rec, sp, x, y, tol)
    for t in np.linspace(0.0, 1.0, 5):
        z = np.array([1.0, 0.0, t])
        rec.fact(f"z_t-upper-bound[t={t:g}]", order_leq(sp, x, z) and order_leq(sp, y, z))
        rec.close(f"z_t-sigma[t={t:g}]", sigma(x, y, z, sp.norm), 2.0, tol)


def _ex_5_7(rec, tol, seed):
    sp = four_ray_space()
    x, y = np.zeros(3), np.array([2.0, 0.0, 0.0])
    _flat_checks(rec, sp, x, y, tol)
    for t in np.linspace(-1.0, 1.0, 5):
        z = np.array([1.0, t, 1.0])
        rec.fact(f"segment-upper-bound[t={t:g}]", order_leq(sp, x, z) and order_leq(sp, y, z))
        rec.close(f"segment-sigma[t={t:g}]", sigma(x, y, z, sp.norm), 2.0, tol)


def _ex_5_11(rec, tol, seed):
    sp = half_lorentz_space()
    a, b, c = np.zeros(3), np.array([0.0, -1.0, 1.0]), np.array([0.0, -1.0, -1.0])
    r3, r6, r2 = math.sqrt(3), math.sqrt(6), math.sqrt(2)
    kappa = (-29 - 8 * r2 + 9 * r3 + 12 * r6) / 23
    ab = quasi_sup(sp, a, b)
    bc = quasi_sup(sp, b, c)
    a_bc = quasi_sup(sp, a, bc.z)
    ab_c = quasi_sup(sp, ab.z, c)
    rec.close("a-sup-b", ab.z, [2 * math.sqrt(2 - r3), 0.0, r3 - 1], tol)
    rec.close("b-sup-c", bc.z, [1.0, -1.0, 0.0], tol)
    rec.close("a-sup-(b-sup-c)", a_bc.z, [2.0, 0.0, 0.0], tol)
    rec.close("(a-sup-b)-sup-c", ab_c.z, [math.sqrt(1 + (1 + kappa) ** 2), 0.0, kappa], tol)
    rec.close("kappa", ab_c.z[2], kappa, tol)
    rec.fact("all-unique", all(r.unique for r in (ab, bc, a_bc, ab_c)))
    rec.above("non-associativity-margin", float(np.linalg.norm(a_bc.z - ab_c.z)), 0.1)
    _oracle_check(rec, sp, a, b, ab.z)


def _ex_5_13(rec, tol, seed):
    sp = polynomial_space()
    x, y = np.array([0.0, 1.0, 0.0]), np.array([0.0, -1.0, 1.0])
    s = (2 - math.sqrt(3)) / 2
    r = quasi_sup(sp, x, y)
    rec.close("sup", r.z, [s, -s, 1.0], tol)
    rec.fact("unique", r.unique)
    m = is_minimal_upper_bound(sp, x, y, r.z, seed=seed)
    rec.fact("not-minimal", not m.minimal)
    w = np.array([1.0, -1.0, 1.0])
    rec.fact("(1,-1,1)-upper-bound", order_leq(sp, x, w) and order_leq(sp, y, w))
    rec.fact("(1,-1,1)-strictly-below-sup", order_leq(sp, w, r.z, 1e-7) and np.linalg.norm(r.z - w) > 1e-3)
    lo, hi = np.array([0.0, -1.0, 1.0]), np.array([0.0, 0.0, 1.0])
    rec.fact("non-monotone-order", order_leq(sp, np.zeros(3), lo) and order_leq(sp, lo, hi))
    rec.close("non-monotone-norms", [np.linalg.norm(lo), np.linalg.norm(hi)], [math.sqrt(2), 1.0], 1e-12)
    _oracle_check(rec, sp, x, y, r.z)


def _ex_6_7(rec, tol, seed, dim=1602, alphas=(1, 2, 4, 8), n_pairs=5):
    sp = weighted_space(dim)
    for a in alphas:
        x, y = weighted_cone_witness(dim, a)
        rec.fact(f"witness-ordered[alpha={a}]", order_leq(sp, np.zeros(dim), x) and order_leq(sp, x, y))
        rep = normality_check(sp, PropertyFlavor("normal", float(a)), [(x, y)])
        rec.above(f"ratio-exceeds-alpha[alpha={a}]", rep.alpha_lower_bound, float(a))
    rng = np.random.default_rng(seed)
    for i in range(n_pairs):
        x, y = rng.standard_normal((2, dim))
        r = quasi_sup(sp, x, y)
        rec.fact(f"random-pair-unique[{i}]", r.unique)
        rec.checks.append(Check(f"random-pair-feasible[{i}]", r.feasibility_residual, 1e-7))


def _ex_prop_7_7(rec, tol, seed):
    sp = lorentz_space(3)
    x, y = np.zeros(3), np.array([0.0, 2.0, 0.0])
    zs = []
    for t in (-2, -1, 0, 1, 2):
        z = np.array([math.sqrt(t * t + 1), 1.0, float(t)])
        zs.append(z)
        rec.fact(f"upper-bound[t={t}]", order_leq(sp, x, z) and order_leq(sp, y, z))
        rec.fact(f"minimal[t={t}]", is_minimal_upper_bound(sp, x, y, z, seed=seed).minimal)
    gap = min(np.linalg.norm(p - q) for i, p in enumerate(zs) for q in zs[i + 1:])
    rec.above("pairwise-distinct", float(gap), 0.1)


REGISTRY = {
    c.id: c
    for c in [
        ExampleCase("ex-5.6", "l-infinity standard cone: flat minimum", PAPER, 1e-6, _ex_5_6),
        ExampleCase("ex-5.7", "four-ray cone: flat minimum on the minimal upper bounds", PAPER, 1e-6, _ex_5_7),
        ExampleCase("ex-5.10", "Lorentz cone: (0,0,0) and (0,0,2)", PAPER, 1e-6, _ex_5_10),
        ExampleCase("ex-5.11", "half-Lorentz cone: non-associativity", PAPER, 1e-4, _ex_5_11),
        ExampleCase("ex-5.13", "polynomial cone: quasi-supremum that is not minimal", PAPER, 1e-4, _ex_5_13),
        ExampleCase("ex-6.7", "weighted cone: unbounded normality constant", PAPER, 1e-6, _ex_6_7),
        ExampleCase("prop-7.7", "Lorentz cone: many minimal upper bounds", PAPER, 1e-6, _ex_prop_7_7),
    ]
}


# ---------------------------------------------------------------------------
# property suites


def identity_families():
    return {
        "standard3": standard_space(3),
        "lorentz2": lorentz_space(2),
        "lorentz3": lorentz_space(3),
        "lorentz5": lorentz_space(5),
        "lorentz8": lorentz_space(8),
        "half-lorentz3": half_lorentz_space(),
    }


def oracle_families():
    return {
        "standard3": standard_space(3),
        "lorentz3": lorentz_space(3),
        "half-lorentz3": half_lorentz_space(),
        "four-ray": four_ray_space(2.0),
        "polynomial": polynomial_space(),
    }


def _identity_case(space, n, tol):
    def run(rec, _tol, seed):
        worst, inapplicable = 0.0, 0
        for x, y, z in random_triples(space, n, seed):
            rep = identity_suite(space, x, y, z, tol)
            if not rep.applicable:
                inapplicable += 1
            worst = max(worst, rep.max_violation)
        rec.checks.append(Check("max-violation", worst, tol))
        rec.fact("all-applicable", inapplicable == 0)

    return run


def oracle_comparison(space, n: int, seed: int = 0, grid: GridSpec | None = None):
    """Largest position error (in grid steps) and sigma error between solver and oracle."""
    rng = np.random.default_rng(seed)
    grid = grid or GridSpec()
    worst_steps, worst_sigma = 0.0, 0.0
    for _ in range(n):
        x, y = rng.standard_normal((2, space.dim))
        r = quasi_sup(space, x, y)
        o = brute_force_quasi_sup(space, x, y, grid)
        worst_steps = max(worst_steps, float(np.linalg.norm(r.z - o.z)) / o.grid_step)
        worst_sigma = max(worst_sigma, abs(r.sigma_value - o.sigma_value))
    return worst_steps, worst_sigma


def _oracle_case(space, n):
    def run(rec, _tol, seed):
        steps, sig = oracle_comparison(space, n, seed)
        rec.checks.append(Check("position-grid-steps", steps, 2.0))
        rec.checks.append(Check("sigma", sig, 1e-3))

    return run


def _attained_case(n):
    def run(rec, tol, seed):
        rng = np.random.default_rng(seed)
        worst = 0.0
        for dim in (3, 5):
            sp = lorentz_space(dim)
            for i in range(n):
                T = random_positive_operator(sp, sp, rng)
                worst = max(worst, positively_attained_check(T, seed=seed + i).positively_attained_gap)
        rec.checks.append(Check("max-gap", worst, tol))

    return run


def _abs_monotone_case(n):
    def run(rec, tol, seed):
        sp = lorentz_space(3)
        rep = absolute_monotonicity_experiment(sp, sp, n, seed)
        rec.checks.append(Check("max-ratio-excess", max(rep.max_ratio - 1.0, 0.0), tol))

    return run


def property_cases(n_identity: int = 100, n_oracle: int = 20, n_operators: int = 50, n_monotone: int = 1000):
    cases = []
    for name, sp in identity_families().items():
        cases.append(ExampleCase(f"identities-{name}", f"identity suite on {name}", DERIVED, 1e-6,
                                 _identity_case(sp, n_identity, 1e-6)))
    for name, sp in oracle_families().items():
        cases.append(ExampleCase(f"oracle-{name}", f"grid oracle on {name}", DERIVED, 0.0, _oracle_case(sp, n_oracle)))
    cases.append(ExampleCase("operators-attained", "positive Lorentz operators attain their norm on the cone",
                             DERIVED, 1e-4, _attained_case(n_operators)))
    cases.append(ExampleCase("operators-absolutely-monotone", "Lorentz operator space is absolutely monotone",
                             DERIVED, 1e-6, _abs_monotone_case(n_monotone)))
    return cases


# ---------------------------------------------------------------------------
# runners


def _execute(case: ExampleCase, seed: int) -> CaseReport:
    rec = _Recorder()
    rep = CaseReport(case.id, case.tag)
    t0 = time.perf_counter()
    try:
        case.run(rec, case.tol, seed)
    except Exception as err:  # a crashing case is a failing case
        rep.error = f"{type(err).__name__}: {err}"
    rep.runtime_ms = 1000.0 * (time.perf_counter() - t0)
    rep.checks = rec.checks
    return rep


def run_example(case, seed: int = 0) -> CaseReport:
    if isinstance(case, str):
        if case not in REGISTRY:
            raise KeyError(f"unknown case: {case}")
        case = REGISTRY[case]
    return _execute(case, seed)


@dataclass
class ConformanceReport:
    seed: int
    cases: list

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.cases if c.tag == PAPER)

    @property
    def all_passed(self) -> bool:
        return all(c.passed for c in self.cases)

    @property
    def exit_code(self) -> int:
        return 0 if self.passed else 1

    def to_dict(self, timings: bool = True):
        cases = [c.to_dict() for c in self.cases]
        if not timings:
            for c in cases:
                c.pop("runtime_ms")
        return {
            "seed": self.seed,
            "pass": self.passed,
            "all_pass": self.all_passed,
            "n_cases": len(cases),
            "n_failed": sum(not c.passed for c in self.cases),
            "cases": cases,
        }


def run_all(seed: int = 0, only=None, properties: bool = True, **sizes) -> ConformanceReport:
    """Run registered examples and (optionally) the property suites.

    ``only`` restricts the run to the listed case ids; an empty list gives an
    empty report.
    """
    cases = list(REGISTRY.values())
    if properties:
        cases += property_cases(**sizes)
    if only is not None:
        known = {c.id for c in cases}
        unknown = [i for i in only if i not in known]
        if unknown:
            raise KeyError(f"unknown case: {', '.join(unknown)}")
        cases = [c for c in cases if c.id in set(only)]
    return ConformanceReport(seed, [_execute(c, seed) for c in cases])
