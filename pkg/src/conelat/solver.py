"""Quasi-suprema: the upper bound of ``{x, y}`` minimising ``|z-x| + |z-y|``.

Every call is reduced to a canonical problem.  The pair is put in
lexicographic order ``(a, b)``, translated by ``-b`` and scaled by
``s = |a - b|_2``, leaving ``w = (a - b)/s`` and the problem
``min sigma_{w,0}`` over ``(w + C) ∩ C``.  The canonical problem is
solved in closed form (l^2 + Lorentz cone) or by consensus Douglas-Rachford
splitting, and mapped back through ``z = b + s * Z``.  The reduction makes the
operation exactly symmetric, translation covariant and positively
homogeneous, and lets repeated sub-problems share a cache.
"""
from __future__ import annotations

import enum
import math
import warnings
from collections import OrderedDict
from dataclasses import asdict, dataclass, field, replace

import numpy as np
from scipy import optimize

from .cones import HalfLorentzCone, LorentzCone, PolyNonnegCone, StandardCone
from .norms import NormSpec
from .spaces import OrderedSpace, order_residual, upper_bound_any
from . import _kernels
from .splitting import DRResult, alternating_polish, consensus_dr, shifted_projector


class Status(str, enum.Enum):
    UNIQUE = "unique"
    FLAT_MINIMUM = "flat_minimum"
    INFEASIBLE = "infeasible"
    MAX_ITER = "max_iter"

    def __str__(self):
        return self.value


class NotAQuasiLatticeError(ValueError):
    """Raised when a quasi-supremum needed by an algebraic operation is not unique."""

    def __init__(self, result: "QuasiSupResult"):
        super().__init__(f"quasi-supremum not available: status {result.status}")
        self.result = result


@dataclass(frozen=True)
class SolverOptions:
    tol_primal: float = 1e-8
    tol_obj: float = 1e-10
    max_iter: int = 100_000
    n_restarts: int = 8
    seed: int = 0
    sep_tol: float | None = None
    step: float = 1.0
    relax: float = 1.8
    # "auto" uses the closed form whenever it applies
    method: str = "auto"
    # "auto" skips restarts when strict convexity already forces uniqueness
    audit: str = "auto"
    # "auto" runs the compiled loop where available
    engine: str = "auto"

    def __post_init__(self):
        if self.method not in ("auto", "closed_form", "splitting"):
            raise ValueError(f"unknown method {self.method!r}")
        if self.engine not in ("auto", "python"):
            raise ValueError(f"unknown engine {self.engine!r}")
        if self.audit not in ("auto", "always", "never"):
            raise ValueError(f"unknown audit mode {self.audit!r}")
        if self.tol_primal <= 0 or self.tol_obj <= 0 or self.max_iter < 1 or self.n_restarts < 0:
            raise ValueError("invalid solver tolerances")
        if not 0 < self.relax < 2:
            raise ValueError("relaxation must lie in (0, 2)")

    @classmethod
    def from_dict(cls, d: dict | None) -> "SolverOptions":
        d = dict(d or {})
        unknown = set(d) - set(cls.__dataclass_fields__)
        if unknown:
            raise ValueError(f"unknown solver options: {sorted(unknown)}")
        return cls(**d)

    def to_dict(self) -> dict:
        return asdict(self)


@dataclass
class QuasiSupResult:
    z: np.ndarray
    sigma_value: float
    status: Status
    feasibility_residual: float
    optimality_gap_estimate: float
    witnesses: list = field(default_factory=list)
    iterations: int = 0
    method: str = ""
    grid_step: float | None = None

    @property
    def unique(self) -> bool:
        return self.status is Status.UNIQUE

    def to_dict(self) -> dict:
        d = {
            "z": _list(self.z),
            "sigma": _num(self.sigma_value),
            "status": self.status.value,
            "feasibility_residual": _num(self.feasibility_residual),
            "optimality_gap_estimate": _num(self.optimality_gap_estimate),
            "witnesses": [_list(w) for w in self.witnesses],
            "iterations": self.iterations,
            "method": self.method,
        }
        if self.grid_step is not None:
            d["grid_step"] = self.grid_step
        return d


def _num(v):
    v = float(v)
    return v if math.isfinite(v) else None


def _list(a):
    return [_num(v) for v in np.asarray(a, dtype=float).ravel()]


def sigma(x, y, z, norm: NormSpec = NormSpec(2.0)):
    """Distance sum ``|z - x| + |z - y|``."""
    x, y, z = (np.asarray(v, dtype=float) for v in (x, y, z))
    if not (x.shape[-1] == y.shape[-1] == z.shape[-1]):
        raise ValueError("dimension mismatch")
    return norm(z - x) + norm(z - y)


# ---------------------------------------------------------------------------
# closed form for l^2 + Lorentz cone


def lorentz_quasi_abs(w, axis):
    """Quasi-absolute value in ``(R^n, |.|_2, L_axis)``.

    In the plane spanned by ``w`` and the axis the cone is a copy of the
    nonnegative quadrant in the orthonormal basis
    ``e± = (±Pw/|Pw| + v)/sqrt(2)``; the quasi-absolute value is the lattice
    absolute value there.
    """
    w = np.asarray(w, dtype=float)
    t = w @ axis
    pw = w - t * axis
    npw = np.linalg.norm(pw)
    if npw <= 1e-15 * max(1.0, abs(t)):
        return abs(t) * axis
    u = pw / npw
    e_plus = (u + axis) / math.sqrt(2.0)
    e_minus = (-u + axis) / math.sqrt(2.0)
    return abs(w @ e_plus) * e_plus + abs(w @ e_minus) * e_minus


def lorentz_quasi_sup(x, y, axis):
    """``x ∨ y = (x + y)/2 + ⌈x - y⌉/2`` with the closed-form quasi-absolute value."""
    x, y = np.asarray(x, dtype=float), np.asarray(y, dtype=float)
    return 0.5 * (x + y) + 0.5 * lorentz_quasi_abs(x - y, axis)


def closed_form_applies(space: OrderedSpace) -> bool:
    return space.norm.p == 2 and isinstance(space.cone, LorentzCone)


def lattice_applies(space: OrderedSpace) -> bool:
    return isinstance(space.cone, StandardCone) and space.norm.p < math.inf


# ---------------------------------------------------------------------------
# splitting path


def _space_key(space):
    key = getattr(space, "_cache_key", None)
    if key is None:
        cone = space.cone
        if isinstance(cone, StandardCone):
            ck = ("standard", cone.dim)
        elif isinstance(cone, PolyNonnegCone):
            ck = ("polynonneg", cone.n_points)
        else:
            ck = (cone.kind, id(cone))
        key = (ck, space.norm.p)
        object.__setattr__(space, "_cache_key", key)
    return key


class _LRU(OrderedDict):
    def __init__(self, maxsize=8192):
        super().__init__()
        self.maxsize = maxsize

    def get_or(self, key, fn):
        if key in self:
            self.move_to_end(key)
            return self[key]
        val = fn()
        self[key] = val
        if len(self) > self.maxsize:
            self.popitem(last=False)
        return val


_cache = _LRU()
# cones referenced by id() in cache keys are kept alive here
_pinned = {}


def clear_cache():
    _cache.clear()
    _pinned.clear()


@dataclass
class _Canonical:
    """Solution of ``w ∨ 0`` in normalised units."""

    z: np.ndarray
    status: Status
    iterations: int
    gap: float
    witnesses: list
    method: str


def _needs_audit(space, opts):
    if opts.audit == "never" or opts.n_restarts == 0:
        return False
    if opts.audit == "always":
        return True
    return not (space.norm.strictly_convex and space.proper)


def _solve_canonical(space: OrderedSpace, w, opts: SolverOptions) -> _Canonical:
    cone, norm = space.cone, space.norm
    zeros = np.zeros_like(w)

    if opts.method != "splitting" and closed_form_applies(space):
        z = 0.5 * w + 0.5 * lorentz_quasi_abs(w, cone.axis)
        return _Canonical(z, Status.UNIQUE, 0, 0.0, [], "closed_form")
    if opts.method != "splitting" and lattice_applies(space):
        # lattice order with a strictly monotone norm: the coordinatewise max
        return _Canonical(np.maximum(w, 0.0), Status.UNIQUE, 0, 0.0, [], "lattice")
    if opts.method == "closed_form":
        raise ValueError("no closed form for this space")

    if norm.strictly_convex and space.proper:
        # comparable pairs: the larger element is the unique minimiser
        if cone.margin(w) >= 0:
            return _Canonical(w.copy(), Status.UNIQUE, 0, 0.0, [], "comparable")
        if cone.margin(-w) >= 0:
            return _Canonical(zeros, Status.UNIQUE, 0, 0.0, [], "comparable")

    try:
        start = upper_bound_any(space, w, zeros)
    except ValueError:
        return _Canonical(np.full_like(w, np.nan), Status.INFEASIBLE, 0, math.inf, [], "splitting")

    proj_w = shifted_projector(cone.project, w)
    proj_0 = lambda u, gamma=None: cone.project(u)
    proxes = [
        lambda u, g: norm.prox(u, g, w),
        lambda u, g: norm.prox(u, g),
        proj_w,
        proj_0,
    ]
    objective = lambda z: float(norm(z - w) + norm(z))

    code = _kernels.cone_code(cone) if norm.p == 2 and opts.engine != "python" else -1
    if code >= 0:
        axis, half = _kernels.cone_params(cone, w.size)

        def run(z0):
            out = _kernels.dr_canonical(w, np.asarray(z0, dtype=float), code, axis, half, opts.step,
                                        opts.relax, opts.tol_primal, opts.tol_obj, opts.max_iter)
            r = DRResult(*out)
            z = _kernels.polish_canonical(r.z, w, code, axis, half, 200, 1e-13)
            return z, objective(z), r
    else:

        def run(z0):
            r = consensus_dr(proxes, z0, objective, gamma=opts.step, relax=opts.relax,
                             tol_primal=opts.tol_primal, tol_obj=opts.tol_obj, max_iter=opts.max_iter)
            z = alternating_polish(r.z, [proj_w, proj_0])
            return z, objective(z), r

    z, obj, r = run(start)
    iterations = r.iterations
    if not r.converged:
        return _Canonical(z, Status.MAX_ITER, iterations, abs(r.fixed_point_step), [], "splitting")

    if not _needs_audit(space, opts):
        return _Canonical(z, Status.UNIQUE, iterations, r.fixed_point_step, [], "splitting")

    rng = np.random.default_rng(opts.seed)
    points = [(z, obj)]
    for _ in range(opts.n_restarts):
        c = np.atleast_2d(cone.sample(rng, 2))
        c = c / np.maximum(np.linalg.norm(c, axis=1, keepdims=True), 1e-12)
        z0 = start + 3.0 * rng.random() * c[0] + rng.random() * c[1]
        zi, oi, ri = run(z0)
        iterations += ri.iterations
        if ri.converged:
            points.append((zi, oi))

    best = min(o for _, o in points)
    sig_tol = max(opts.tol_obj, 1e-7) * (1.0 + best)
    good = [p for p, o in points if o <= best + sig_tol]
    sep = opts.sep_tol if opts.sep_tol is not None else 1e-4 * (1.0 + 1.0)
    reps = _cluster(good, sep)
    if len(reps) >= 2:
        reps.sort(key=tuple)
        return _Canonical(reps[0], Status.FLAT_MINIMUM, iterations, r.fixed_point_step, reps, "splitting")
    return _Canonical(z, Status.UNIQUE, iterations, r.fixed_point_step, [], "splitting")


def _cluster(points, sep):
    reps = []
    for p in points:
        if all(np.linalg.norm(p - q) > sep for q in reps):
            reps.append(p)
    return reps


def quasi_sup(space: OrderedSpace, x, y, opts: SolverOptions | None = None) -> QuasiSupResult:
    """The υ-quasi-supremum of ``{x, y}`` with a uniqueness verdict."""
    opts = opts or SolverOptions()
    x, y = space.vec(x), space.vec(y)
    if not np.all(np.isfinite(x)) or not np.all(np.isfinite(y)):
        raise ValueError("inputs must be finite")
    if tuple(x) < tuple(y):
        a, b = y, x
    else:
        a, b = x, y
    d = a - b
    s = float(np.linalg.norm(d))
    if s == 0.0:
        return QuasiSupResult(x.copy(), 0.0, Status.UNIQUE, 0.0, 0.0, method="trivial")
    w = d / s
    if opts.sep_tol is not None:
        # sep_tol is given in original units; the canonical problem is scaled by 1/s
        opts = replace(opts, sep_tol=opts.sep_tol / s)
    else:
        ratio = float(space.norm(d)) / s
        opts = replace(opts, sep_tol=1e-4 * (1.0 + ratio * s) / s)

    key = (_space_key(space), w.tobytes(), opts)
    if key[0][0][1] == id(space.cone):
        _pinned[id(space.cone)] = space.cone
    can = _cache.get_or(key, lambda: _solve_canonical(space, w, opts))

    z = b + s * can.z
    wit = [b + s * p for p in can.witnesses]
    if can.status is Status.INFEASIBLE:
        return QuasiSupResult(z, math.inf, can.status, math.inf, math.inf, [], can.iterations, can.method)
    feas = max(order_residual(space, x, z), order_residual(space, y, z))
    return QuasiSupResult(
        z=z,
        sigma_value=float(sigma(x, y, z, space.norm)),
        status=can.status,
        feasibility_residual=feas,
        optimality_gap_estimate=s * can.gap,
        witnesses=wit,
        iterations=can.iterations,
        method=can.method,
    )


# ---------------------------------------------------------------------------
# minimality


@dataclass
class MinimalityResult:
    minimal: bool
    witness: np.ndarray | None = None  # d != 0 with z - d still an upper bound
    smaller_bound: np.ndarray | None = None
    max_gain: float = 0.0
    directions_tried: int = 0

    def __bool__(self):
        return self.minimal

    def to_dict(self):
        return {
            "minimal": self.minimal,
            "witness": None if self.witness is None else _list(self.witness),
            "smaller_bound": None if self.smaller_bound is None else _list(self.smaller_bound),
            "max_gain": self.max_gain,
            "directions_tried": self.directions_tried,
        }


def is_minimal_upper_bound(space: OrderedSpace, x, y, z, tol: float = 1e-7, n_dirs: int = 8,
                           seed: int = 0, witness_tol: float = 1e-5,
                           sweeps: int = 5000) -> MinimalityResult:
    """Decide whether the upper bound ``z`` of ``{x, y}`` is minimal.

    ``z`` is minimal iff ``D = {d : d >= 0, z - d >= x, z - d >= y}`` is
    ``{0}``.  For each direction ``u`` in a fixed panel (coordinate
    directions and ``n_dirs`` random ones) the point ``u`` is projected onto
    ``D`` with Dykstra's algorithm; the projection is non-zero exactly when
    ``D`` holds some ``d`` with ``<u, d> > 0``.  Sizes are measured relative
    to the distance of ``z`` from ``{x, y}``.
    """
    x, y, z = space.vec(x), space.vec(y), space.vec(z)
    scale = max(float(np.linalg.norm(z - x)), float(np.linalg.norm(z - y)))
    if max(order_residual(space, x, z), order_residual(space, y, z)) > tol * max(1.0, scale):
        raise ValueError("z is not an upper bound of {x, y}")
    if scale == 0.0:
        return MinimalityResult(True)
    a, b = (z - x) / scale, (z - y) / scale
    cone = space.cone
    projs = [
        cone.project,
        shifted_projector(cone.project, a, sign=-1.0),
        shifted_projector(cone.project, b, sign=-1.0),
    ]
    n = space.dim
    dirs = [s * e for e in np.eye(n) for s in (1.0, -1.0)]
    rng = np.random.default_rng(seed)
    for _ in range(n_dirs):
        u = rng.standard_normal(n)
        dirs.append(u / np.linalg.norm(u))

    best = 0.0
    for k, u in enumerate(dirs, start=1):
        d = alternating_polish(u, projs, sweeps=sweeps, tol=1e-14)
        feas = max(
            -float(cone.margin(d)),
            -float(cone.margin(a - d)),
            -float(cone.margin(b - d)),
            0.0,
        )
        nd = float(np.linalg.norm(d))
        if feas <= tol:
            best = max(best, nd)
            if nd > witness_tol:
                wd = scale * d
                return MinimalityResult(False, wd, z - wd, nd, k)
    return MinimalityResult(True, None, None, best, len(dirs))


# ---------------------------------------------------------------------------
# grid oracle


@dataclass(frozen=True)
class GridSpec:
    """Exhaustive-search settings: ``points`` per axis on the initial grid,
    then ``levels`` zoomed grids of ``zoom_points`` per axis."""

    points: int = 81
    bounds: tuple | None = None
    levels: int = 10
    feas_slack: float = 1.0
    zoom_points: int = 21
    # grid points within tie_slack * (diagonal step) of the best value seed refinements
    tie_slack: float = 2.0
    max_seeds: int = 4
    # refined points within flat_tol * (final diagonal step) in sigma tie
    flat_tol: float = 10.0
    sep_tol: float | None = None


def _oracle_margin(cone):
    if isinstance(cone, PolyNonnegCone):
        return _polynonneg_exact_margin
    return cone.margin


def _polynonneg_exact_margin(c):
    """min over t in [0, 1] of ``a t^2 + b t + c``, normalised like the grid rows."""
    a, b, cc = c[..., 0], c[..., 1], c[..., 2]
    vals = [cc, a + b + cc]
    with np.errstate(divide="ignore", invalid="ignore"):
        tv = np.where(a > 0, -b / (2 * a), 0.0)
    tv = np.clip(tv, 0.0, 1.0)
    vals.append(a * tv * tv + b * tv + cc)
    # scale by the norm of (t^2, t, 1) so the margin is a distance-like slack
    m = np.minimum.reduce(vals)
    return m / np.sqrt(1.0 + tv * tv + tv ** 4)


def brute_force_quasi_sup(space: OrderedSpace, x, y, grid: GridSpec | None = None) -> QuasiSupResult:
    """Grid search for the σ-minimiser over the upper bounds of ``{x, y}`` (dim <= 4).

    The initial grid covers ``[min(x,y) - 1, max(x,y) + |x-y| + 1]`` per axis
    (widened to reach a feasible point when needed).  A few well separated
    near-optimal grid points are refined on zoomed grids and finished with a
    local SLSQP step, which helps in thin curved valleys where axis-aligned
    grids stall.  ``grid_step`` in the result is the initial resolution.
    """
    grid = grid or GridSpec()
    x, y = space.vec(x), space.vec(y)
    n = space.dim
    if n > 4:
        raise ValueError("grid oracle is limited to dimension <= 4")
    norm = space.norm
    margin = _oracle_margin(space.cone)
    def evaluate(pts, tol):
        ok = np.empty(len(pts), dtype=bool)
        sig = np.empty(len(pts))
        for i in range(0, len(pts), 65536):
            p = pts[i:i + 65536]
            ok[i:i + 65536] = (margin(p - x) >= -tol) & (margin(p - y) >= -tol)
            sig[i:i + 65536] = norm(p - x) + norm(p - y)
        sig[~ok] = np.inf
        return sig

    # membership is relaxed in proportion to the grid step, so thin feasible
    # wedges always contain grid points; the slack vanishes as the grid refines
    def slack_of(h):
        return grid.feas_slack * float(np.linalg.norm(h)) + 1e-12

    def mesh(lo, hi, k):
        axes = [np.linspace(l, h, k) for l, h in zip(lo, hi)]
        return np.stack(np.meshgrid(*axes, indexing="ij"), axis=-1).reshape(-1, n), (hi - lo) / (k - 1)

    if grid.bounds is not None:
        lo, hi = (np.asarray(b, dtype=float) for b in grid.bounds)
    else:
        span = float(norm(x - y))
        lo = np.minimum(x, y) - 1.0
        hi = np.maximum(x, y) + span + 1.0
    k = grid.points if n <= 3 else min(grid.points, 31)
    for _ in range(12):
        pts, step = mesh(lo, hi, k)
        sig = evaluate(pts, slack_of(step))
        if np.isfinite(sig).any():
            break
        ub = upper_bound_any(space, x, y)
        c = 0.5 * (lo + hi)
        half = np.maximum(hi - lo, 2 * np.abs(ub - c) + 1.0)
        lo, hi = c - half, c + half
    else:
        raise ValueError("no feasible grid point found")
    coarse_step = float(step.max())

    i0 = int(np.argmin(sig))
    best_sig = float(sig[i0])
    h0 = step

    def refine(z):
        h = h0
        for _ in range(grid.levels):
            zs = math.inf
            for _ in range(50):
                half = 3.0 * h
                pts_z, hz = mesh(z - half, z + half, grid.zoom_points)
                s2 = evaluate(pts_z, slack_of(hz))
                j = int(np.argmin(s2))
                # re-centre on the window's best point until it stops improving
                if not s2[j] < zs:
                    break
                z, zs = pts_z[j], float(s2[j])
            h = hz
        return z, zs, h

    # seeds: near-optimal grid points, spread out greedily
    slack = grid.tie_slack * float(np.linalg.norm(h0))
    near = pts[sig <= best_sig + slack]
    seeds = [pts[i0]]
    far_tol = max(2.0 * coarse_step, grid.sep_tol or 0.0)
    while len(seeds) < grid.max_seeds:
        dist = np.min([np.linalg.norm(near - q, axis=1) for q in seeds], axis=0)
        k = int(np.argmax(dist))
        if dist[k] <= far_tol:
            break
        seeds.append(near[k])
    refined = []
    for r in sorted((refine(q) for q in seeds), key=lambda r: r[1]):
        if all(np.linalg.norm(r[0] - q[0]) > far_tol for q in refined):
            refined.append(r)
    refined = [_slsqp_polish(*r, x, y, norm, margin) for r in refined]
    z, zs, h = min(refined, key=lambda r: r[1])

    flat_tol = grid.flat_tol * float(np.linalg.norm(h)) + 1e-12 * (1.0 + zs)
    flat = [r[0] for r in refined if r[1] <= zs + flat_tol]
    reps = _cluster(flat, far_tol)
    if len(reps) >= 2:
        reps.sort(key=tuple)
        return QuasiSupResult(reps[0], float(sigma(x, y, reps[0], norm)), Status.FLAT_MINIMUM, 0.0,
                              float(h.max()), reps, method="grid", grid_step=coarse_step)
    return QuasiSupResult(z, zs, Status.UNIQUE, 0.0, float(h.max()), [], method="grid",
                          grid_step=coarse_step)


def _slsqp_polish(z, zs, h, x, y, norm, margin):
    cons = [
        {"type": "ineq", "fun": lambda v: float(margin(v - x))},
        {"type": "ineq", "fun": lambda v: float(margin(v - y))},
    ]
    fun = lambda v: float(norm(v - x) + norm(v - y))
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        r = optimize.minimize(fun, z, method="SLSQP", constraints=cons,
                              options={"ftol": 1e-14, "maxiter": 100})
    v = r.x
    if np.all(np.isfinite(v)) and min(margin(v - x), margin(v - y)) >= -1e-10 and fun(v) < zs:
        return v, fun(v), h
    return z, zs, h
