"""Operators between ordered spaces: positivity, operator and Robinson norms, order experiments.

An operator ``T : X -> Y`` is a dense ``m x n`` matrix with ``m = dim Y`` and
``n = dim X``.  ``T`` is positive when it maps the cone of ``X`` into the cone
of ``Y``.  The Robinson norm is ``sup |Tx|`` over positive unit vectors.
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field

import numpy as np

from .cones import (
    HalfLorentzCone,
    LorentzCone,
    PolyhedralCone,
    StandardCone,
    WeightedLorentzCone,
    ZeroCone,
)
from .metrics import (
    COUNTEREXAMPLE,
    HOLDS,
    Flavor,
    conormality_constant_estimate,
    normality_check,
    PropertyFlavor,
    sample_normality_items,
)
from .spaces import OrderedSpace, space_from_dict

VACUOUS = "vacuous"


@dataclass(frozen=True, eq=False)
class OperatorMatrix:
    entries: np.ndarray
    domain: OrderedSpace
    codomain: OrderedSpace

    def __post_init__(self):
        a = np.array(self.entries, dtype=float)
        if a.ndim != 2 or a.shape != (self.codomain.dim, self.domain.dim):
            raise ValueError(
                f"entries must have shape ({self.codomain.dim}, {self.domain.dim}), got {a.shape}"
            )
        if not np.all(np.isfinite(a)):
            raise ValueError("entries must be finite")
        a.setflags(write=False)
        object.__setattr__(self, "entries", a)

    @property
    def shape(self):
        return self.entries.shape

    def __call__(self, x):
        return self.entries @ np.asarray(x, dtype=float).T if np.ndim(x) == 1 else np.asarray(x) @ self.entries.T

    def _like(self, a):
        return OperatorMatrix(a, self.domain, self.codomain)

    def _check_same(self, other):
        if not isinstance(other, OperatorMatrix) or other.shape != self.shape:
            raise ValueError("operators act between different spaces")

    def __add__(self, other):
        self._check_same(other)
        return self._like(self.entries + other.entries)

    def __sub__(self, other):
        self._check_same(other)
        return self._like(self.entries - other.entries)

    def __mul__(self, c):
        return self._like(float(c) * self.entries)

    __rmul__ = __mul__

    def __neg__(self):
        return self._like(-self.entries)

    def to_dict(self):
        return {
            "entries": self.entries.tolist(),
            "domain": self.domain.to_dict(),
            "codomain": self.codomain.to_dict(),
        }

    @classmethod
    def from_dict(cls, d: dict) -> "OperatorMatrix":
        if not isinstance(d, dict) or not {"entries", "domain", "codomain"} <= d.keys():
            raise ValueError("operator needs 'entries', 'domain' and 'codomain'")
        return cls(d["entries"], space_from_dict(d["domain"]), space_from_dict(d["codomain"]))


def rank_one(f, y, domain: OrderedSpace, codomain: OrderedSpace) -> OperatorMatrix:
    """``(f ⊗ y)(x) = f(x) y``."""
    f = np.asarray(f, dtype=float)
    y = np.asarray(y, dtype=float)
    if f.shape != (domain.dim,) or y.shape != (codomain.dim,):
        raise ValueError(
            f"f must have length {domain.dim} and y length {codomain.dim}, got {f.shape} and {y.shape}"
        )
    return OperatorMatrix(np.outer(y, f), domain, codomain)


def identity(space: OrderedSpace) -> OperatorMatrix:
    return OperatorMatrix(np.eye(space.dim), space, space)


# ---------------------------------------------------------------------------
# positivity


@dataclass
class PositivityResult:
    positive: bool
    exact: bool
    max_violation: float
    witness: np.ndarray | None = None
    n_rays: int = 0

    def __bool__(self):
        return self.positive

    def to_dict(self):
        return {
            "positive": self.positive,
            "mode": "exact" if self.exact else "sampled",
            "max_violation": self.max_violation,
            "witness": None if self.witness is None else self.witness.tolist(),
            "n_rays": self.n_rays,
        }


def _perp_basis(v):
    """Orthonormal basis of ``v``-perp as the columns of an ``n x (n-1)`` array."""
    return np.linalg.svd(v[None, :])[2][1:].T


class _RayFamily:
    """Extreme rays ``r(u)`` of a round-type cone parameterized by a unit vector ``u``."""

    def __init__(self, cone):
        self.cone = cone
        if isinstance(cone, (LorentzCone, HalfLorentzCone)):
            self.basis = _perp_basis(cone.axis)
        else:
            self.basis = None
        self.pdim = cone.dim - 1

    def ray(self, u):
        c = self.cone
        u = u / np.linalg.norm(u)
        if isinstance(c, WeightedLorentzCone):
            r = np.empty(c.dim)
            r[0] = 1.0
            r[1:] = u / math.sqrt(float(np.sum(c.weights * u * u)))
            return r
        d = self.basis @ u
        if isinstance(c, HalfLorentzCone):
            s = d @ c.half
            if s < 0:
                d = d - 2.0 * s * c.half
        return c.axis + d


def _codomain_violation(T, rays):
    imgs = np.atleast_2d(T(rays))
    scale = np.maximum(1.0, np.linalg.norm(imgs, axis=-1))
    return -np.atleast_1d(T.codomain.cone.margin(imgs)) / scale


def operator_positive(T: OperatorMatrix, tol: float = 1e-9, n_rays: int = 256, seed: int = 0,
                      refine_iters: int = 50) -> PositivityResult:
    """Does ``T`` map the domain cone into the codomain cone?

    Polyhedral and standard domains are decided exactly on the generators.
    For Lorentz-type domains ``n_rays`` extreme rays are sampled and the worst
    few are pushed further along the boundary by projected ascent, so a
    ``True`` there means "no violation found".
    """
    dom = T.domain.cone
    if isinstance(dom, ZeroCone):
        return PositivityResult(True, True, 0.0)
    if isinstance(dom, (StandardCone, PolyhedralCone)):
        gens = np.eye(dom.dim) if isinstance(dom, StandardCone) else dom.generators
        viol = _codomain_violation(T, gens)
        i = int(np.argmax(viol))
        ok = bool(viol[i] <= tol)
        return PositivityResult(ok, True, float(max(viol[i], 0.0)), None if ok else gens[i].copy(), len(gens))

    rng = np.random.default_rng(seed)
    if isinstance(dom, (LorentzCone, HalfLorentzCone, WeightedLorentzCone)) and dom.dim >= 2:
        fam = _RayFamily(dom)
        us = rng.standard_normal((n_rays, fam.pdim))
        if fam.pdim <= 2:
            # cover low-dimensional boundaries evenly as well
            if fam.pdim == 1:
                us = np.vstack([us, [[1.0], [-1.0]]])
            else:
                th = np.linspace(0, 2 * np.pi, 64, endpoint=False)
                us = np.vstack([us, np.column_stack([np.cos(th), np.sin(th)])])
        rays = np.array([fam.ray(u) for u in us])
        viol = _codomain_violation(T, rays)
        order = np.argsort(-viol)[: min(8, len(us))]

        def score(u):
            return float(_codomain_violation(T, fam.ray(u)[None, :])[0])

        best_u, best = us[order[0]], float(viol[order[0]])
        for k in order:
            u, val = _ascend(score, us[k] / np.linalg.norm(us[k]), float(viol[k]), refine_iters)
            if val > best:
                best_u, best = u, val
        ok = best <= tol
        return PositivityResult(ok, False, max(best, 0.0), None if ok else fam.ray(best_u), len(rays))

    samples = np.atleast_2d(dom.sample(rng, n_rays))
    viol = _codomain_violation(T, samples)
    i = int(np.argmax(viol))
    ok = bool(viol[i] <= tol)
    return PositivityResult(ok, False, float(max(viol[i], 0.0)), None if ok else samples[i].copy(), len(samples))


def _ascend(score, u, val, iters, h=1e-6):
    """Maximize ``score`` over the unit sphere by finite-difference gradient steps with step halving."""
    step = 0.5
    n = u.size
    eye = np.eye(n)
    for _ in range(iters):
        g = np.array([(score(u + h * eye[i]) - score(u - h * eye[i])) / (2 * h) for i in range(n)])
        g -= (g @ u) * u
        gn = np.linalg.norm(g)
        if gn < 1e-14:
            break
        while step > 1e-10:
            cand = u + step * g / gn
            cand /= np.linalg.norm(cand)
            cv = score(cand)
            if cv > val:
                u, val = cand, cv
                step = min(1.0, 2 * step)
                break
            step *= 0.5
        else:
            break
    return u, val


# ---------------------------------------------------------------------------
# operator norm


@dataclass
class NormEstimate:
    value: float
    exact: bool
    iterations: int = 0

    def __float__(self):
        return self.value

    def to_dict(self):
        return {"value": self.value, "kind": "exact" if self.exact else "lower-bound", "iterations": self.iterations}


def spectral_norm(a, tol: float = 1e-13, max_iter: int = 100_000, seed: int = 0):
    """Largest singular value by power iteration on ``AᵀA``; returns ``(value, right vector, iterations)``."""
    a = np.asarray(a, dtype=float)
    n = a.shape[1]
    m = a.T @ a
    top = float(np.abs(m).max(initial=0.0))
    if top == 0.0:
        return 0.0, np.eye(n)[0] if n else np.zeros(0), 0
    # a few squarings widen the spectral gap that the power steps see
    p = m / top
    for _ in range(4):
        p = p @ p
        p /= max(float(np.abs(p).max()), 1e-300)
    rng = np.random.default_rng(seed)
    x = rng.standard_normal(n)
    x /= np.linalg.norm(x)
    lam = 0.0
    quiet = 0
    it = 0
    for it in range(1, max_iter + 1):
        y = p @ x
        ny = np.linalg.norm(y)
        if ny == 0.0:
            x = rng.standard_normal(n)
            x /= np.linalg.norm(x)
            continue
        x = y / ny
        new = float(x @ m @ x)
        if abs(new - lam) <= tol * max(new, 1e-300):
            quiet += 1
            if quiet >= 2:
                lam = new
                break
        else:
            quiet = 0
        lam = new
    # finish with plain steps on AᵀA itself so the value carries no squaring error
    for _ in range(3):
        y = m @ x
        x = y / np.linalg.norm(y)
    return math.sqrt(max(float(x @ m @ x), 0.0)), x, it


def _lp_norm(x, p):
    return float(np.linalg.norm(x, ord=p))


def operator_norm_estimate(T: OperatorMatrix, n_samples: int = 2000, seed: int = 0) -> NormEstimate:
    """Operator norm between the two l^p norms.

    Exact for l^2 -> l^2 (power iteration), for an l^1 domain (largest image
    of a unit vector ``e_i``) and for an l^inf domain of dimension <= 16
    (largest image of a sign vector).  Otherwise a sampled lower bound.
    """
    a = T.entries
    p, q = T.domain.norm.p, T.codomain.norm.p
    if p == 2 and q == 2:
        v, _, it = spectral_norm(a, seed=seed)
        return NormEstimate(v, True, it)
    n = a.shape[1]
    if p == 1:
        return NormEstimate(max((_lp_norm(a[:, j], q) for j in range(n)), default=0.0), True)
    if p == math.inf and n <= 16:
        best = 0.0
        for signs in itertools.product((1.0, -1.0), repeat=n - 1):
            best = max(best, _lp_norm(a @ np.array((1.0,) + signs), q))
        return NormEstimate(best, True)
    rng = np.random.default_rng(seed)
    xs = rng.standard_normal((n_samples, n))
    xs = np.vstack([xs, np.eye(n)])
    vals = [_lp_norm(a @ x, q) / _lp_norm(x, p) for x in xs]
    k = int(np.argmax(vals))

    def score(u):
        return _lp_norm(a @ u, q) / _lp_norm(u, p)

    _, best = _ascend(score, xs[k] / np.linalg.norm(xs[k]), vals[k], 50)
    return NormEstimate(float(best), False)


def operator_norm(T: OperatorMatrix, seed: int = 0) -> float:
    return operator_norm_estimate(T, seed=seed).value


# ---------------------------------------------------------------------------
# Robinson norm


@dataclass
class _Robinson:
    value: float
    x: np.ndarray
    n_rays: int
    iterations: int


def _robinson(T: OperatorMatrix, n_samples: int, refine_iters: int, seed: int, n_refine: int = 8) -> _Robinson:
    dom, norm_x, norm_y = T.domain.cone, T.domain.norm, T.codomain.norm
    if isinstance(dom, ZeroCone):
        raise ValueError("the domain cone is {0}; the Robinson norm is undefined")
    rng = np.random.default_rng(seed)
    cands = [np.atleast_2d(dom.sample(rng, n_samples)), dom.interior_point()[None, :]]
    if isinstance(dom, (StandardCone, PolyhedralCone)):
        cands.append(np.eye(dom.dim) if isinstance(dom, StandardCone) else dom.generators)
    if norm_x.p == 2 and norm_y.p == 2:
        # the top singular directions, pulled into the cone, are natural starts
        _, v, _ = spectral_norm(T.entries, seed=seed)
        cands.append(np.array([dom.project(v), dom.project(-v)]))
    xs = np.vstack(cands)
    nx = norm_x(xs)
    xs = xs[nx > 1e-12] / nx[nx > 1e-12, None]
    if len(xs) == 0:
        raise ValueError("no nonzero vector found in the domain cone")
    vals = norm_y(T(xs))
    order = np.argsort(-vals)[:n_refine]
    best_i = int(order[0])
    best = _Robinson(float(vals[best_i]), xs[best_i], len(xs), 0)
    for k in order:
        x, val, it = _cone_ascent(T, xs[k], float(vals[k]), refine_iters)
        best.iterations = max(best.iterations, it)
        if val > best.value:
            best.value, best.x = val, x
    return best


def _cone_ascent(T: OperatorMatrix, x, val, iters):
    """Projected gradient ascent of ``|Tx|`` on the cone intersected with the unit sphere."""
    dom, norm_x, norm_y = T.domain.cone, T.domain.norm, T.codomain.norm
    a = T.entries
    q = norm_y.p
    step = 1.0
    it = 0
    for it in range(1, iters + 1):
        y = a @ x
        ny = float(norm_y(y))
        if ny == 0.0:
            break
        # gradient of |y|_q at y (a dual-norm-one functional)
        if q == 2:
            g = y / ny
        elif q == math.inf:
            g = np.zeros_like(y)
            i = int(np.argmax(np.abs(y)))
            g[i] = np.sign(y[i])
        elif q == 1:
            g = np.sign(y)
        else:
            g = np.sign(y) * (np.abs(y) / ny) ** (q - 1)
        grad = a.T @ g
        improved = False
        while step > 1e-12:
            c = dom.project(x + step * grad)
            nc = float(norm_x(c))
            if nc > 1e-14:
                c = c / nc
                cv = float(norm_y(a @ c))
                if cv > val:
                    x, val, improved = c, cv, True
                    step = min(4.0, 2.0 * step)
                    break
            step *= 0.5
        if not improved:
            break
    return x, val, it


def robinson_norm(T: OperatorMatrix, n_samples: int = 500, refine_iters: int = 50, seed: int = 0) -> float:
    """Lower bound for ``sup |Tx|`` over positive unit ``x``; deterministic per seed."""
    return _robinson(T, n_samples, refine_iters, seed).value


@dataclass
class OperatorNormReport:
    op_norm: float
    robinson_norm_lb: float
    positively_attained_gap: float
    n_rays: int
    refinement_iters: int
    passed: bool
    tol: float
    op_norm_exact: bool = True
    maximizer: np.ndarray | None = None

    def to_dict(self):
        return {
            "op_norm": self.op_norm,
            "op_norm_kind": "exact" if self.op_norm_exact else "lower-bound",
            "robinson_norm_lb": self.robinson_norm_lb,
            "positively_attained_gap": self.positively_attained_gap,
            "tol": self.tol,
            "pass": self.passed,
            "n_rays": self.n_rays,
            "refinement_iters": self.refinement_iters,
            "maximizer": None if self.maximizer is None else self.maximizer.tolist(),
        }


def positively_attained_check(T: OperatorMatrix, tol: float = 1e-4, n_samples: int = 500,
                              refine_iters: int = 50, seed: int = 0, check_positive: bool = True) -> OperatorNormReport:
    """Compare ``|T|`` with the Robinson-norm lower bound.

    The gap is one-sided: a large gap means either that the norm is not
    positively attained or that the search missed the maximizer.
    """
    if check_positive:
        pos = operator_positive(T, seed=seed)
        if not pos.positive:
            raise ValueError(f"operator is not positive (violation {pos.max_violation:.3g})")
    est = operator_norm_estimate(T, seed=seed)
    rob = _robinson(T, n_samples, refine_iters, seed)
    gap = est.value - rob.value
    return OperatorNormReport(est.value, rob.value, gap, rob.n_rays, rob.iterations, gap <= tol, tol,
                              est.exact, rob.x)


# ---------------------------------------------------------------------------
# positive operator sampling


def _random_orthogonal(k, rng):
    if k == 0:
        return np.zeros((0, 0))
    q, r = np.linalg.qr(rng.standard_normal((k, k)))
    return q * np.sign(np.diag(r))


def _dual_sample(cone, rng):
    if isinstance(cone, (StandardCone, LorentzCone)):
        return cone.sample(rng)
    if isinstance(cone, PolyhedralCone):
        h = cone.halfspaces
        return rng.exponential(size=len(h)) @ h
    return cone.dual().sample(rng)


def _rotation_part(X, Y, rng, contraction):
    """``v_Y ⊗ v_X + c R`` on the perps; positive between Lorentz cones of equal dimension."""
    vx, vy = X.cone.axis, Y.cone.axis
    bx, by = _perp_basis(vx), _perp_basis(vy)
    r = _random_orthogonal(X.dim - 1, rng)
    return np.outer(vy, vx) + contraction * (by @ r @ bx.T)


def random_positive_operator(X: OrderedSpace, Y: OrderedSpace, rng, n_rank_one: int | None = None) -> OperatorMatrix:
    """A positive operator built from provably positive pieces.

    Nonnegative combinations of rank-ones ``f ⊗ y`` (``f`` in the dual
    cone, ``y`` in the cone) and, between Lorentz cones of equal dimension,
    maps fixing the axis direction and rotating (or contracting) its
    complement.
    """
    if isinstance(Y.cone, ZeroCone):
        return OperatorMatrix(np.zeros((Y.dim, X.dim)), X, Y)
    rotations = (type(X.cone) is LorentzCone and type(Y.cone) is LorentzCone and X.dim == Y.dim and X.dim >= 2)
    if n_rank_one is None:
        n_rank_one = int(rng.integers(0, 3)) if rotations else int(rng.integers(1, 4))
    a = np.zeros((Y.dim, X.dim))
    for _ in range(n_rank_one):
        a += rng.exponential() * np.outer(Y.cone.sample(rng), _dual_sample(X.cone, rng))
    if rotations:
        for _ in range(int(rng.integers(1, 3))):
            c = 1.0 if rng.random() < 0.5 else float(rng.random())
            a += rng.exponential() * _rotation_part(X, Y, rng, c)
    return OperatorMatrix(a, X, Y)


# ---------------------------------------------------------------------------
# order experiments on B(X, Y)


@dataclass
class TransferReport:
    flavor: str
    bound: float
    verdict: str
    max_ratio: float
    n_trials: int
    worst_trial: int | None = None
    alpha: float | None = None
    beta: float | None = None
    seed: int = 0
    note: str = ""

    @property
    def holds(self) -> bool:
        return self.verdict != COUNTEREXAMPLE

    def to_dict(self):
        return {
            "flavor": self.flavor,
            "alpha": self.alpha,
            "beta": self.beta,
            "bound": self.bound,
            "verdict": self.verdict,
            "max_ratio": self.max_ratio,
            "n_trials": self.n_trials,
            "worst_trial": self.worst_trial,
            "seed": self.seed,
            "note": self.note,
        }


def _opnorm(a, seed=0):
    return spectral_norm(a, seed=seed)[0]


def _ordered_family(X, Y, kind, rng):
    """Operators satisfying the order hypothesis of ``kind`` exactly, as raw matrices."""
    A = random_positive_operator(X, Y, rng).entries
    B = random_positive_operator(X, Y, rng).entries
    if kind is Flavor.ABS_NORMAL:
        return (A - B) / 2, (A + B) / 2  # -S <= T <= S
    if kind is Flavor.NORMAL:
        return A, A + B  # 0 <= T <= S
    R = rng.standard_normal((Y.dim, X.dim))
    return R, R + A, R + A + B  # R <= T <= S


def _family_ratio(X, Y, kind, ops):
    nrm = (lambda a: _opnorm(a)) if X.norm.p == 2 and Y.norm.p == 2 else (
        lambda a: operator_norm_estimate(OperatorMatrix(a, X, Y)).value)
    if kind in (Flavor.ABS_NORMAL, Flavor.NORMAL):
        t, s = ops
        top, bottom = nrm(t), nrm(s)
    else:
        r, t, s = ops
        top = nrm(t)
        bottom = max(nrm(r), nrm(s)) if kind is Flavor.MAX_NORMAL else nrm(r) + nrm(s)
    if bottom == 0.0:
        return math.inf if top > 0 else 0.0
    return top / bottom


def normality_transfer_check(X: OrderedSpace, Y: OrderedSpace, flavor, alpha: float | None = None,
                             beta: float | None = None, n_trials: int = 200, seed: int = 0,
                             tol: float = 1e-9, n_estimate: int = 200) -> TransferReport:
    """Check ``flavor`` for ``B(X, Y)`` at the level ``alpha * beta`` on sampled operators.

    ``alpha`` is the conormality constant of ``X`` for the partner flavor,
    ``beta`` the normality constant of ``Y``; either is estimated when not
    given.  A zero codomain cone makes every order hypothesis trivial and
    the check is reported as vacuous.
    """
    kind = Flavor(flavor.kind if isinstance(flavor, PropertyFlavor) else flavor)
    if kind.is_conormal:
        raise ValueError(f"{kind.value} is not a normality flavor")
    if isinstance(Y.cone, ZeroCone):
        return TransferReport(kind.value, math.nan, VACUOUS, 0.0, 0, alpha=alpha, beta=beta, seed=seed,
                              note="codomain cone is {0}")
    if alpha is None:
        alpha = conormality_constant_estimate(X, kind.dual_partner, n_estimate, seed)
    if beta is None:
        items = sample_normality_items(Y, kind, n_estimate, seed)
        beta = max(1.0, normality_check(Y, PropertyFlavor(kind, 1.0), items).alpha_lower_bound)
    rng = np.random.default_rng(seed)
    bound = alpha * beta
    worst, worst_i = 0.0, None
    for i in range(n_trials):
        r = _family_ratio(X, Y, kind, _ordered_family(X, Y, kind, rng))
        if worst_i is None or r > worst:
            worst, worst_i = r, i
    verdict = HOLDS if worst <= bound * (1 + tol) + tol else COUNTEREXAMPLE
    return TransferReport(kind.value, bound, verdict, worst, n_trials, worst_i, alpha, beta, seed)


def absolute_monotonicity_experiment(X: OrderedSpace, Y: OrderedSpace, n_trials: int = 1000, seed: int = 0,
                                     alpha: float = 1.0, beta: float = 1.0, tol: float = 1e-6) -> TransferReport:
    """Sample ``±T <= S`` in ``B(X, Y)`` via ``T = (A-B)/2``, ``S = (A+B)/2`` and track ``|T|/|S|``."""
    rep = normality_transfer_check(X, Y, Flavor.ABS_NORMAL, alpha, beta, n_trials, seed, tol)
    return rep


# ---------------------------------------------------------------------------
# Robinson-norm equivalence for arbitrary operators


@dataclass
class RobinsonBound:
    op_norm: float
    robinson_norm_lb: float
    alpha: float
    holds: bool

    def to_dict(self):
        return {"op_norm": self.op_norm, "robinson_norm_lb": self.robinson_norm_lb, "alpha": self.alpha,
                "holds": self.holds}


def robinson_equivalence(T: OperatorMatrix, alpha: float, n_samples: int = 500, seed: int = 0,
                         tol: float = 1e-9) -> RobinsonBound:
    """One-sided check of ``|T|₊ <= |T| <= 2 alpha |T|₊`` with the sampled ``|T|₊``.

    The right inequality uses a lower bound of ``|T|₊``, so it can only fail
    conservatively.
    """
    op = operator_norm(T, seed)
    rob = robinson_norm(T, n_samples, seed=seed)
    ok = rob <= op * (1 + tol) + tol and op <= 2 * alpha * rob * (1 + tol) + tol
    return RobinsonBound(op, rob, alpha, ok)
