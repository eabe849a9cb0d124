"""Quasi-lattice algebra on top of the quasi-supremum solver."""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .solver import (
    NotAQuasiLatticeError,
    SolverOptions,
    closed_form_applies,
    lorentz_quasi_abs,
    quasi_sup,
)
from .spaces import OrderedSpace, order_residual, upper_bound_any


def _sup(space, x, y, opts):
    r = quasi_sup(space, x, y, opts)
    if not r.unique:
        raise NotAQuasiLatticeError(r)
    return r.z


def quasi_inf(space: OrderedSpace, x, y, opts: SolverOptions | None = None):
    """``x ∧ y = -((-x) ∨ (-y))``."""
    x, y = space.vec(x), space.vec(y)
    return -_sup(space, -x, -y, opts)


def quasi_abs(space: OrderedSpace, x, opts: SolverOptions | None = None):
    """``⌈x⌉ = (-x) ∨ x``."""
    x = space.vec(x)
    if closed_form_applies(space) and (opts is None or opts.method != "splitting"):
        return lorentz_quasi_abs(x, space.cone.axis)
    return _sup(space, -x, x, opts)


def pos_part(space: OrderedSpace, x, opts: SolverOptions | None = None):
    x = space.vec(x)
    return _sup(space, np.zeros_like(x), x, opts)


def neg_part(space: OrderedSpace, x, opts: SolverOptions | None = None):
    x = space.vec(x)
    return _sup(space, np.zeros_like(x), -x, opts)


def ando_decompose(space: OrderedSpace, x, opts: SolverOptions | None = None):
    """``(x+, x-, max(|x+|, |x-|)/|x|)``; the ratio is 0 for ``x = 0``."""
    x = space.vec(x)
    p, m = pos_part(space, x, opts), neg_part(space, x, opts)
    nx = float(space.norm(x))
    ratio = 0.0 if nx == 0 else max(float(space.norm(p)), float(space.norm(m))) / nx
    return p, m, ratio


# ---------------------------------------------------------------------------
# identity suite


@dataclass
class IdentityRecord:
    name: str
    max_violation: float
    passed: bool
    kind: str  # "equality", "order" or "mixed"

    def to_dict(self):
        return {"name": self.name, "max_violation": self.max_violation, "pass": self.passed, "kind": self.kind}


@dataclass
class IdentityReport:
    records: list = field(default_factory=list)
    applicable: bool = True
    reason: str = ""

    @property
    def passed(self) -> bool:
        return self.applicable and all(r.passed for r in self.records)

    @property
    def max_violation(self) -> float:
        return max((r.max_violation for r in self.records), default=0.0)

    def to_dict(self):
        return {
            "applicable": self.applicable,
            "pass": self.passed,
            "reason": self.reason,
            "identities": [r.to_dict() for r in self.records],
        }


IDENTITY_NAMES = (
    "idempotence",
    "positive-homogeneity",
    "negative-homogeneity",
    "translation",
    "parts-positive",
    "abs-homogeneity",
    "decomposition",
    "positive-elements",
    "abs-idempotence",
    "sum-and-difference",
    "half-sum-formula",
    "triangle",
    "reverse-triangle",
)


def identity_suite(space: OrderedSpace, x, y, z, tol: float = 1e-6, order_tol: float | None = None,
                   opts: SolverOptions | None = None) -> IdentityReport:
    """Evaluate the quasi-lattice identities and the two triangle inequalities at ``(x, y, z)``.

    Equalities are measured in the space norm, order relations by the
    membership residual.  If some quasi-supremum on the way is not unique the
    report is marked inapplicable instead of failed.
    """
    order_tol = tol if order_tol is None else order_tol
    x, y, z = space.vec(x), space.vec(y), space.vec(z)
    nrm = space.norm
    zero = np.zeros_like(x)

    def sup(a, b):
        return _sup(space, a, b, opts)

    def inf(a, b):
        return -_sup(space, -a, -b, opts)

    def absv(a):
        return quasi_abs(space, a, opts)

    def eq(*pairs):
        return max(float(nrm(a - b)) for a, b in pairs)

    def geq(*pairs):
        # residual of a >= b
        return max(order_residual(space, b, a) for a, b in pairs)

    report = IdentityReport()

    def add(name, e=0.0, o=0.0, kind="equality"):
        report.records.append(IdentityRecord(name, max(e, o), e <= tol and o <= order_tol, kind))

    try:
        sxy, ixy = sup(x, y), inf(x, y)
        add("idempotence", eq((sup(x, x), x), (inf(x, x), x)))
        a = 2.5
        add("positive-homogeneity", eq((sup(a * x, a * y), a * sxy), (inf(a * x, a * y), a * ixy)))
        a = -2.0
        add("negative-homogeneity", eq((sup(a * x, a * y), a * ixy), (inf(a * x, a * y), a * sxy)))
        add("translation", eq((sxy + z, sup(x + z, y + z)), (ixy + z, inf(x + z, y + z))))
        xp, xm = sup(zero, x), sup(zero, -x)
        add("parts-positive", eq((xm, sup(zero, -x))), geq((xp, zero), (xm, zero)), "mixed")
        ax = absv(x)
        add("abs-homogeneity", eq((absv(-2.0 * x), 2.0 * ax), (absv(-x), ax)), geq((ax, zero)), "mixed")
        add("decomposition", eq((x, xp - xm), (inf(xp, xm), zero), (ax, xp + xm)))
        p = upper_bound_any(space, x, zero)
        add("positive-elements", eq((inf(p, zero), zero), (sup(zero, p), p), (absv(p), p)))
        add("abs-idempotence", eq((absv(ax), ax)))
        axy = absv(x - y)
        add("sum-and-difference", eq((sxy + ixy, x + y), (sxy - ixy, axy)))
        add("half-sum-formula", eq((sxy, 0.5 * (x + y) + 0.5 * axy), (ixy, 0.5 * (x + y) - 0.5 * axy)))
        ay = absv(y)
        add("triangle", o=geq((ax + ay, x + y), (ax + ay, -(x + y))), kind="order")
        rev = []
        for s in (absv(x + y), axy):
            rev += [(s, x - ay), (s, -x - ay), (s, y - ax), (s, -y - ax)]
        add("reverse-triangle", o=geq(*rev), kind="order")
    except NotAQuasiLatticeError as err:
        report.applicable = False
        report.reason = str(err)
    return report


def random_triples(space: OrderedSpace, n: int, seed: int = 0, scale: float = 1.0):
    rng = np.random.default_rng(seed)
    return scale * rng.standard_normal((n, 3, space.dim))
