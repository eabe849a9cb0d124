"""Sampling checks for normality, numerical conormality constants and regularity reports.

Normality is refuted by counterexamples, never proved: a verdict of
``holds-on-sample`` only says no sampled instance violated the bound.
Conormality programs are solved per point; the maximum ratio over sampled
unit vectors is a lower bound for the best constant.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field

import numpy as np

from .solver import SolverOptions, quasi_sup
from .spaces import OrderedSpace, order_residual, upper_bound_any
from .splitting import alternating_polish, consensus_dr, shifted_projector


class Flavor(str, enum.Enum):
    MAX_NORMAL = "max-normal"
    SUM_NORMAL = "sum-normal"
    ABS_NORMAL = "abs-normal"
    NORMAL = "normal"
    SUM_CONORMAL = "sum-conormal"
    MAX_CONORMAL = "max-conormal"
    ABS_CONORMAL = "abs-conormal"
    CONORMAL = "conormal"

    @property
    def is_conormal(self) -> bool:
        return self.value.endswith("conormal")

    @property
    def dual_partner(self) -> "Flavor":
        return _PARTNER[self]


_PARTNER = {
    Flavor.MAX_NORMAL: Flavor.SUM_CONORMAL,
    Flavor.SUM_NORMAL: Flavor.MAX_CONORMAL,
    Flavor.ABS_NORMAL: Flavor.ABS_CONORMAL,
    Flavor.NORMAL: Flavor.CONORMAL,
}
_PARTNER.update({v: k for k, v in list(_PARTNER.items())})


@dataclass(frozen=True)
class PropertyFlavor:
    kind: Flavor
    alpha: float = 1.0
    approximate: bool = False

    def __post_init__(self):
        object.__setattr__(self, "kind", Flavor(self.kind))
        if not self.alpha > 0:
            raise ValueError("alpha must be positive")
        if self.approximate and not self.kind.is_conormal:
            raise ValueError("only conormal flavors have an approximate variant")

    def to_dict(self):
        return {"kind": self.kind.value, "alpha": self.alpha, "approximate": self.approximate}


def _flavor(f) -> Flavor:
    return f.kind if isinstance(f, PropertyFlavor) else Flavor(f)


# ---------------------------------------------------------------------------
# normality


HOLDS = "holds-on-sample"
COUNTEREXAMPLE = "counterexample-found"


@dataclass
class NormalityReport:
    flavor: PropertyFlavor
    verdict: str
    alpha_lower_bound: float
    witness: tuple | None = None
    n_checked: int = 0
    n_skipped: int = 0

    @property
    def holds(self) -> bool:
        return self.verdict == HOLDS

    def to_dict(self):
        return {
            "flavor": self.flavor.to_dict(),
            "verdict": self.verdict,
            "alpha_lower_bound": self.alpha_lower_bound,
            "witness": None if self.witness is None else [np.asarray(w).tolist() for w in self.witness],
            "n_checked": self.n_checked,
            "n_skipped": self.n_skipped,
        }


def normality_ratio(space: OrderedSpace, flavor, item) -> float:
    """``|x| / bound`` for one sample item (``(z, x, y)`` or ``(x, y)``)."""
    kind = _flavor(flavor)
    n = space.norm
    if kind in (Flavor.MAX_NORMAL, Flavor.SUM_NORMAL):
        z, x, y = item
        bound = max(n(y), n(z)) if kind is Flavor.MAX_NORMAL else n(y) + n(z)
    elif kind in (Flavor.ABS_NORMAL, Flavor.NORMAL):
        x, y = item
        bound = n(y)
    else:
        raise ValueError(f"{kind.value} is not a normality flavor")
    nx = float(n(x))
    if bound == 0:
        return math.inf if nx > 0 else 0.0
    return nx / float(bound)


def _precondition(space, kind, item):
    """Largest order residual among the flavor's hypotheses."""
    if kind in (Flavor.MAX_NORMAL, Flavor.SUM_NORMAL):
        z, x, y = item
        return max(order_residual(space, z, x), order_residual(space, x, y))
    x, y = item
    zero = np.zeros_like(x)
    if kind is Flavor.ABS_NORMAL:
        return max(order_residual(space, x, y), order_residual(space, -x, y))
    return max(order_residual(space, zero, x), order_residual(space, x, y))


def normality_check(space: OrderedSpace, flavor: PropertyFlavor, sample, tol: float = 1e-9) -> NormalityReport:
    """Test the flavor's inequality on every sample item meeting its order hypothesis.

    Items are ``(z, x, y)`` with ``z <= x <= y`` for max/sum-normality and
    ``(x, y)`` with ``±x <= y`` or ``0 <= x <= y`` otherwise.  Items whose
    hypothesis fails (beyond ``tol``, scaled by the item size) are skipped.
    """
    if not isinstance(flavor, PropertyFlavor):
        flavor = PropertyFlavor(flavor)
    kind = flavor.kind
    if kind.is_conormal:
        raise ValueError("normality_check needs a normality flavor")
    worst, witness, checked, skipped = 0.0, None, 0, 0
    for item in sample:
        item = tuple(space.vec(v) for v in item)
        scale = max(1.0, max(float(np.linalg.norm(v)) for v in item))
        if _precondition(space, kind, item) > tol * scale:
            skipped += 1
            continue
        checked += 1
        r = normality_ratio(space, kind, item)
        if r > worst:
            worst = r
            if r > flavor.alpha * (1.0 + tol) + tol:
                witness = item
    if checked == 0:
        raise ValueError("no sample item satisfies the order hypothesis")
    verdict = COUNTEREXAMPLE if witness is not None else HOLDS
    return NormalityReport(flavor, verdict, worst, witness, checked, skipped)


def sample_normality_items(space: OrderedSpace, flavor, n: int, seed: int = 0):
    """Items meeting the flavor's order hypothesis by construction.

    Ordered items are built from cone samples ``c1, c2``: ``(x - c1, x, x + c2)``
    for the three-point flavors, ``((c1 - c2)/2, (c1 + c2)/2)`` for absolute
    normality and ``(c1, c1 + c2)`` for plain normality.  The second cone
    sample is scaled by a random factor so that near-equal pairs occur.
    """
    kind = _flavor(flavor)
    rng = np.random.default_rng(seed)
    cone = space.cone
    c1 = np.atleast_2d(cone.sample(rng, n))
    c2 = np.atleast_2d(cone.sample(rng, n)) * rng.exponential(size=(n, 1)) ** 2
    if kind in (Flavor.MAX_NORMAL, Flavor.SUM_NORMAL):
        x = rng.standard_normal((n, space.dim))
        return [(x[i] - c1[i], x[i], x[i] + c2[i]) for i in range(n)]
    if kind is Flavor.ABS_NORMAL:
        return [(0.5 * (c1[i] - c2[i]), 0.5 * (c1[i] + c2[i])) for i in range(n)]
    if kind is Flavor.NORMAL:
        return [(c1[i], c1[i] + c2[i]) for i in range(n)]
    raise ValueError(f"{kind.value} is not a normality flavor")


# ---------------------------------------------------------------------------
# conormality


@dataclass
class Decomposition:
    flavor: Flavor
    x: np.ndarray
    a: np.ndarray
    b: np.ndarray | None
    ratio: float
    iterations: int = 0
    converged: bool = True

    def to_dict(self):
        return {
            "flavor": self.flavor.value,
            "x": self.x.tolist(),
            "a": self.a.tolist(),
            "b": None if self.b is None else self.b.tolist(),
            "ratio": self.ratio,
            "iterations": self.iterations,
            "converged": self.converged,
        }


def _epi_project(norm, u, s):
    """Euclidean projection of ``(u, s)`` onto ``{(a, t) : |a| <= t}``."""
    nu = float(norm(u))
    if nu <= s:
        return u.copy(), s
    # the polar cone is the epigraph of the dual norm, reflected
    if float(norm.dual(u)) <= -s:
        return np.zeros_like(u), 0.0
    if norm.p == 2:
        t = 0.5 * (s + nu)
        return u * (t / nu), t
    # (prox_{lam |.|}(u), s + lam) with |prox| = s + lam; the gap is decreasing in lam
    lo, hi = max(0.0, -s), max(1.0, 2.0 * nu + abs(s))
    for _ in range(200):
        lam = 0.5 * (lo + hi)
        if norm(norm.prox(u, lam)) > s + lam:
            lo = lam
        else:
            hi = lam
        if hi - lo <= 1e-15 * (1.0 + hi):
            break
    lam = 0.5 * (lo + hi)
    return norm.prox(u, lam), s + lam


def conormality_solve(space: OrderedSpace, flavor, x, tol: float = 1e-8,
                      opts: SolverOptions | None = None) -> Decomposition:
    """Solve the flavor's decomposition program for ``x``.

    sum:  min |a| + |b| with a, b >= 0 and x = a - b
    max:  min max(|a|, |b|) under the same constraints
    abs:  min |a| with ±x <= a
    plain: min |a| with 0, x <= a
    """
    kind = _flavor(flavor)
    if not kind.is_conormal:
        raise ValueError("conormality_solve needs a conormal flavor")
    if not space.generating:
        raise ValueError("cone is not generating: no decomposition exists")
    x = space.vec(x)
    norm, cone = space.norm, space.cone
    nx = float(norm(x))
    zero = np.zeros_like(x)
    if nx == 0:
        return Decomposition(kind, x, zero, zero if kind in (Flavor.SUM_CONORMAL, Flavor.MAX_CONORMAL) else None, 0.0)
    if opts is None:
        # the epigraph form of the max flavor has a linear objective, where
        # plain averaging converges about three times faster than over-relaxation
        relax = 1.0 if kind is Flavor.MAX_CONORMAL else 1.8
        opts = SolverOptions(tol_primal=tol, tol_obj=tol * 1e-2, max_iter=50_000, relax=relax, audit="never")

    if kind is Flavor.SUM_CONORMAL:
        # |a| + |a - x| over a in C ∩ (x + C) is the distance sum of {0, x}
        r = quasi_sup(space, zero, x, opts)
        a = r.z
        return Decomposition(kind, x, a, a - x, (float(norm(a)) + float(norm(a - x))) / nx, r.iterations)

    proj_c = lambda u, g=None: cone.project(u)
    if kind is Flavor.MAX_CONORMAL:
        return _max_conormal(space, x, nx, opts)

    if kind is Flavor.ABS_CONORMAL:
        sets = [shifted_projector(cone.project, x), shifted_projector(cone.project, -x)]
        start = upper_bound_any(space, x, -x)
    else:
        sets = [proj_c, shifted_projector(cone.project, x)]
        start = upper_bound_any(space, x, zero)
    proxes = [lambda u, g: norm.prox(u, g)] + sets
    r = consensus_dr(proxes, start, lambda a: float(norm(a)), gamma=opts.step * nx, relax=opts.relax,
                     tol_primal=opts.tol_primal * nx, tol_obj=opts.tol_obj, max_iter=opts.max_iter)
    a = alternating_polish(r.z, sets)
    return Decomposition(kind, x, a, None, float(norm(a)) / nx, r.iterations, r.converged)


def _max_conormal(space, x, nx, opts):
    norm, cone = space.norm, space.cone
    n = x.size
    start_a = upper_bound_any(space, x, np.zeros_like(x))
    start = np.append(start_a, max(float(norm(start_a)), float(norm(start_a - x))))

    def split(f):
        return lambda u, g: f(u[:n], u[n])

    def epi0(a, t):
        p, s = _epi_project(norm, a, t)
        return np.append(p, s)

    def epix(a, t):
        p, s = _epi_project(norm, a - x, t)
        return np.append(p + x, s)

    proxes = [
        lambda u, g: np.append(u[:n], u[n] - g),
        split(epi0),
        split(epix),
        split(lambda a, t: np.append(cone.project(a), t)),
        split(lambda a, t: np.append(x + cone.project(a - x), t)),
    ]
    r = consensus_dr(proxes, start, lambda u: float(u[n]), gamma=opts.step * nx, relax=opts.relax,
                     tol_primal=opts.tol_primal * nx, tol_obj=opts.tol_obj, max_iter=opts.max_iter)
    sets = [lambda a, g=None: cone.project(a), shifted_projector(cone.project, x)]
    a = alternating_polish(r.z[:n], sets)
    b = a - x
    return Decomposition(Flavor.MAX_CONORMAL, x, a, b, max(float(norm(a)), float(norm(b))) / nx,
                         r.iterations, r.converged)


def conormality_constant_estimate(space: OrderedSpace, flavor, n_samples: int = 1000, seed: int = 0,
                                  tol: float = 1e-8) -> float:
    """Largest decomposition ratio over sampled unit vectors (a lower bound for the best constant)."""
    rng = np.random.default_rng(seed)
    worst = 0.0
    for _ in range(n_samples):
        x = rng.standard_normal(space.dim)
        x /= float(space.norm(x))
        worst = max(worst, conormality_solve(space, flavor, x, tol).ratio)
    return worst


# ---------------------------------------------------------------------------
# regularity


REGULARITY_KINDS = {
    "ellis-grosberg-krein": (Flavor.MAX_NORMAL, Flavor.SUM_CONORMAL),
    "batty-robinson": (Flavor.SUM_NORMAL, Flavor.MAX_CONORMAL),
    "absolute-davies-ng": (Flavor.ABS_NORMAL, Flavor.ABS_CONORMAL),
    "davies-ng": (Flavor.NORMAL, Flavor.CONORMAL),
}


@dataclass
class RegularityReport:
    alpha: float
    kinds: dict = field(default_factory=dict)
    normality: dict = field(default_factory=dict)
    conormality: dict = field(default_factory=dict)

    def holds(self, kind: str) -> bool:
        return self.kinds[kind]

    def to_dict(self):
        return {
            "alpha": self.alpha,
            "kinds": dict(self.kinds),
            "normality": {k: v.to_dict() for k, v in self.normality.items()},
            "conormality_estimates": dict(self.conormality),
            "note": "sampled evidence; conormal flavors are reported as approximate",
        }


def regularity_classify(space: OrderedSpace, alpha: float, n_samples: int = 1000, seed: int = 0,
                        n_conormal_samples: int | None = None, extra_items: dict | None = None,
                        ando_alphas=None, tol: float = 1e-6) -> RegularityReport:
    """Report which regularity kinds hold at level ``alpha`` on the sample.

    ``extra_items`` maps a normality flavor name to additional hand-built
    items (e.g. known counterexamples).  Andô regularity is checked as
    "generating and max-normal at some level in ``ando_alphas``" (default:
    ``[alpha]``), since an existential constant cannot be refuted by sampling.
    """
    extra_items = extra_items or {}
    n_con = n_samples if n_conormal_samples is None else n_conormal_samples
    rep = RegularityReport(alpha)

    def norm_items(kind):
        items = sample_normality_items(space, kind, n_samples, seed)
        return items + list(extra_items.get(kind.value, []))

    for kind in (Flavor.MAX_NORMAL, Flavor.SUM_NORMAL, Flavor.ABS_NORMAL, Flavor.NORMAL):
        rep.normality[kind.value] = normality_check(space, PropertyFlavor(kind, alpha), norm_items(kind), tol)
    for kind in (Flavor.SUM_CONORMAL, Flavor.MAX_CONORMAL, Flavor.ABS_CONORMAL, Flavor.CONORMAL):
        rep.conormality[kind.value] = (
            conormality_constant_estimate(space, kind, n_con, seed) if space.generating else math.inf
        )
    for name, (nk, ck) in REGULARITY_KINDS.items():
        rep.kinds[name] = rep.normality[nk.value].holds and rep.conormality[ck.value] <= alpha * (1 + tol) + tol
    levels = [alpha] if ando_alphas is None else list(ando_alphas)
    bound = rep.normality[Flavor.MAX_NORMAL.value].alpha_lower_bound
    rep.kinds["ando"] = bool(space.generating and any(bound <= a * (1 + tol) + tol for a in levels))
    return rep


# ---------------------------------------------------------------------------
# duality


@dataclass
class DualSpotCheck:
    flavor: Flavor
    partner: Flavor
    alpha: float
    primal_holds: bool
    dual_holds: bool
    primal_value: float
    dual_value: float

    @property
    def agree(self) -> bool:
        return self.primal_holds == self.dual_holds

    def to_dict(self):
        return {
            "flavor": self.flavor.value,
            "dual_flavor": self.partner.value,
            "alpha": self.alpha,
            "primal_holds": self.primal_holds,
            "dual_holds": self.dual_holds,
            "primal_value": self.primal_value,
            "dual_value": self.dual_value,
            "agree": self.agree,
        }


def _flavor_value(space, kind, alpha, n_samples, seed, tol):
    if kind.is_conormal:
        v = conormality_constant_estimate(space, kind, n_samples, seed)
    else:
        items = sample_normality_items(space, kind, n_samples, seed)
        v = normality_check(space, PropertyFlavor(kind, alpha), items, 1e-9).alpha_lower_bound
    return v <= alpha * (1 + tol) + tol, v


def dual_normality_spotcheck(space: OrderedSpace, flavor, alpha: float, n_samples: int = 200,
                             seed: int = 0, tol: float = 1e-6) -> DualSpotCheck:
    """Check ``flavor`` on the space and its partner flavor on the dual space."""
    kind = _flavor(flavor)
    try:
        dual = space.dual_space()
    except NotImplementedError as err:
        raise ValueError(str(err)) from err
    ph, pv = _flavor_value(space, kind, alpha, n_samples, seed, tol)
    dh, dv = _flavor_value(dual, kind.dual_partner, alpha, n_samples, seed, tol)
    return DualSpotCheck(kind, kind.dual_partner, alpha, ph, dh, pv, dv)


# ---------------------------------------------------------------------------
# Example 6.7 style witnesses


def weighted_cone_witness(dim: int, alpha: float):
    """``(x, y)`` with ``0 <= x <= y`` and ``|x| > alpha |y|`` in the harmonic weighted cone.

    ``y = (2, 0, ...)`` and ``x = e_1 + sqrt(n) e_n`` with ``n = ceil((2 alpha)^2) + 1``
    (1-based coordinate ``n``), which needs ``dim >= n``.
    """
    n = math.ceil((2.0 * alpha) ** 2) + 1
    if n > dim:
        raise ValueError(f"alpha={alpha} needs dimension at least {n}")
    x = np.zeros(dim)
    y = np.zeros(dim)
    y[0] = 2.0
    x[0] = 1.0
    x[n - 1] = math.sqrt(n)
    return x, y
