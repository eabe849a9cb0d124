"""Closed convex cones in R^n: membership, Euclidean projection and duality.

Every cone exposes the same small surface:

``margin(x)``
    signed slack of the defining inequalities (>= 0 inside), batched over
    leading axes;
``contains(x, tol)``
    ``margin(x) >= -tol``;
``project(x)``
    Euclidean projection onto the cone;
``dual()``
    the dual cone under the standard inner product;
``interior_point()``
    a point in the interior, used to build upper bounds;
``sample(rng, size)``
    random members.
"""
from __future__ import annotations

import functools
import itertools
import math
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np
from scipy.optimize import brentq, nnls

DEFAULT_TOL = 1e-9


class ConvergenceError(RuntimeError):
    """An iterative projection did not reach its tolerance."""


def _as_unit(v, name="axis"):
    v = np.asarray(v, dtype=float)
    if v.ndim != 1:
        raise ValueError(f"{name} must be a 1-d vector")
    nv = np.linalg.norm(v)
    if not np.isfinite(nv) or nv == 0.0:
        raise ValueError(f"{name} must be a non-zero finite vector")
    return v / nv


def _check_dim(x, n):
    x = np.asarray(x, dtype=float)
    if x.shape[-1] != n:
        raise ValueError(f"dimension mismatch: expected {n}, got {x.shape[-1]}")
    return x


class Cone:
    """Base class. Subclasses set ``dim`` and implement ``margin``/``project``."""

    dim: int
    kind: str = "cone"

    def margin(self, x):
        raise NotImplementedError

    def contains(self, x, tol=DEFAULT_TOL):
        if tol < 0:
            raise ValueError("tol must be non-negative")
        return bool(np.all(self.margin(x) >= -tol))

    def project(self, x):
        raise NotImplementedError

    def dual(self) -> "Cone":
        raise NotImplementedError(f"dual of {self.kind} cone is not supported")

    def interior_point(self):
        raise NotImplementedError

    def sample(self, rng, size=None):
        raise NotImplementedError

    # proper / generating are analytic facts for every family we ship
    @property
    def is_proper(self) -> bool:
        return True

    @property
    def is_generating(self) -> bool:
        return True

    def to_dict(self) -> dict:
        raise NotImplementedError


# ---------------------------------------------------------------------------
# standard cone


@dataclass(frozen=True)
class StandardCone(Cone):
    """The nonnegative orthant."""

    dim: int
    kind = "standard"

    def __post_init__(self):
        if self.dim < 1:
            raise ValueError("dimension must be positive")

    def margin(self, x):
        x = _check_dim(x, self.dim)
        return x.min(axis=-1)

    def project(self, x):
        return np.maximum(_check_dim(x, self.dim), 0.0)

    def dual(self):
        return self

    def interior_point(self):
        return np.ones(self.dim)

    def sample(self, rng, size=None):
        shape = (self.dim,) if size is None else (size, self.dim)
        return np.abs(rng.standard_normal(shape))

    def to_dict(self):
        return {"kind": "standard"}


# ---------------------------------------------------------------------------
# Lorentz family


def lorentz_project(x, axis):
    """Closed-form projection onto ``{x : <axis,x> >= |P x|}``, ``axis`` unit."""
    t = float(x @ axis)
    u = x - t * axis
    nu = math.sqrt(u @ u)
    if nu <= t:
        return x.copy()
    if nu <= -t:
        return np.zeros_like(x)
    return 0.5 * (t + nu) * (axis + u / nu)


@dataclass(frozen=True)
class LorentzCone(Cone):
    """``{x : <v|x> >= |Px|}`` with ``P`` the projection onto ``v``-perp."""

    axis: np.ndarray
    kind = "lorentz"

    def __post_init__(self):
        object.__setattr__(self, "axis", _as_unit(self.axis))

    @classmethod
    def standard(cls, n: int, index: int = 0) -> "LorentzCone":
        v = np.zeros(n)
        v[index] = 1.0
        return cls(v)

    @property
    def dim(self):
        return self.axis.size

    def split(self, x):
        """Return ``(<v|x>, Px)``."""
        t = x @ self.axis
        return t, x - t[..., None] * self.axis if np.ndim(t) else x - t * self.axis

    def margin(self, x):
        x = _check_dim(x, self.dim)
        t, u = self.split(x)
        return t - np.linalg.norm(u, axis=-1)

    def project(self, x):
        return lorentz_project(_check_dim(x, self.dim), self.axis)

    def dual(self):
        return self

    def interior_point(self):
        return self.axis.copy()

    def boundary_ray(self, u):
        """Extreme ray ``v + u/|u|`` for a direction ``u`` orthogonal to the axis."""
        u = u - (u @ self.axis) * self.axis
        return self.axis + u / np.linalg.norm(u)

    def sample(self, rng, size=None):
        m = 1 if size is None else size
        u = rng.standard_normal((m, self.dim))
        u -= np.outer(u @ self.axis, self.axis)
        # height >= |u|, a quarter of the samples exactly on the boundary
        slack = np.abs(rng.standard_normal(m)) * (rng.random(m) > 0.25)
        t = np.linalg.norm(u, axis=1) + slack
        out = u + t[:, None] * self.axis
        return out[0] if size is None else out

    def to_dict(self):
        return {"kind": "lorentz", "axis": self.axis.tolist()}


@dataclass(frozen=True)
class HalfLorentzCone(Cone):
    """Lorentz cone cut by the half-space ``<h|x> >= 0`` with ``h`` orthogonal to the axis."""

    axis: np.ndarray
    half: np.ndarray
    kind = "half_lorentz"

    def __post_init__(self):
        v = _as_unit(self.axis)
        h = _as_unit(self.half, "half")
        if v.shape != h.shape:
            raise ValueError("axis and half-space normal differ in dimension")
        if abs(v @ h) > 1e-12:
            raise ValueError("half-space normal must be orthogonal to the axis")
        object.__setattr__(self, "axis", v)
        object.__setattr__(self, "half", h)

    @classmethod
    def standard(cls, n: int = 3) -> "HalfLorentzCone":
        v, h = np.zeros(n), np.zeros(n)
        v[0] = h[1] = 1.0
        return cls(v, h)

    @property
    def dim(self):
        return self.axis.size

    @property
    def lorentz(self):
        return LorentzCone(self.axis)

    def margin(self, x):
        x = _check_dim(x, self.dim)
        return np.minimum(self.lorentz.margin(x), x @ self.half)

    def project(self, x):
        # If the Lorentz projection leaves the half-space, the answer lies on
        # the hyperplane <h|z> = 0, where the cut cone is again a Lorentz cone.
        x = _check_dim(x, self.dim)
        z = lorentz_project(x, self.axis)
        if z @ self.half >= 0.0:
            return z
        return lorentz_project(x - (x @ self.half) * self.half, self.axis)

    def dual(self):
        # L + ray(h); returned as a polyhedral inner approximation
        rays = _circle_rays(self.axis, 256)
        return PolyhedralCone(generators=np.vstack([rays, self.half[None, :]]))

    def interior_point(self):
        return self.axis + 0.5 * self.half

    def sample(self, rng, size=None):
        s = np.atleast_2d(self.lorentz.sample(rng, 1 if size is None else size))
        c = s @ self.half
        s -= np.outer(c - np.abs(c), self.half)
        return s[0] if size is None else s

    def to_dict(self):
        return {"kind": "half_lorentz", "axis": self.axis.tolist(), "half": self.half.tolist()}


def _circle_rays(axis, k):
    """``k`` boundary rays of the Lorentz cone spread over v-perp (n >= 2)."""
    n = axis.size
    basis = np.linalg.svd(axis[None, :])[2][1:]  # orthonormal basis of v-perp
    rng = np.random.default_rng(12345)
    if n == 2:
        dirs = np.array([[1.0], [-1.0]])
    elif n == 3:
        th = np.linspace(0, 2 * np.pi, k, endpoint=False)
        dirs = np.stack([np.cos(th), np.sin(th)], axis=1)
    else:
        dirs = rng.standard_normal((k, n - 1))
        dirs /= np.linalg.norm(dirs, axis=1, keepdims=True)
    return axis + dirs @ basis


@dataclass(frozen=True)
class WeightedLorentzCone(Cone):
    """``{x : x_1 >= sqrt(sum_{i>=2} w_i x_i^2)}`` with positive weights ``w``.

    With ``w_m = 1/m`` this is the finite truncation of the proper, closed,
    generating but non-normal cone on l^2.
    """

    weights: np.ndarray
    kind = "weighted_lorentz"

    def __post_init__(self):
        w = np.asarray(self.weights, dtype=float)
        if w.ndim != 1 or w.size < 1 or np.any(w <= 0):
            raise ValueError("weights must be a non-empty vector of positive numbers")
        object.__setattr__(self, "weights", w)

    @classmethod
    def harmonic(cls, n: int) -> "WeightedLorentzCone":
        """Weights ``1/m`` for coordinates ``m = 2..n`` (1-based)."""
        return cls(1.0 / np.arange(2, n + 1))

    @property
    def dim(self):
        return self.weights.size + 1

    def margin(self, x):
        x = _check_dim(x, self.dim)
        return x[..., 0] - np.sqrt(np.sum(self.weights * x[..., 1:] ** 2, axis=-1))

    def project(self, x):
        x = _check_dim(x, self.dim)
        t, u = x[0], x[1:]
        w = self.weights
        r = np.sqrt(np.sum(w * u * u))
        if r <= t:
            return x.copy()
        # polar cone is -{y : y_1 >= |W^{-1/2} y'|}
        if np.sqrt(np.sum(u * u / w)) <= -t:
            return np.zeros_like(x)

        # KKT: z' = u / (1 + (s - t) w / s), z_1 = s, with |W^{1/2} z'| = s
        def gap(s):
            zu = u / (1.0 + (s - t) * w / s)
            return np.sqrt(np.sum(w * zu * zu)) - s

        # gap > 0 just above max(t, 0) and -> -inf as s grows; one root
        hi = max(r, abs(t))
        while gap(hi) > 0:
            hi *= 2.0
        if t > 0:
            lo = t
        else:
            lo = hi
            while gap(lo) <= 0:
                lo *= 0.5
        s = brentq(gap, lo, hi, xtol=1e-15 * hi, rtol=4 * np.finfo(float).eps, maxiter=500)
        out = np.empty_like(x)
        out[0] = s
        out[1:] = u / (1.0 + (s - t) * w / s)
        return out

    def dual(self):
        return WeightedLorentzCone(1.0 / self.weights)

    def interior_point(self):
        e = np.zeros(self.dim)
        e[0] = 1.0
        return e

    def sample(self, rng, size=None):
        m = 1 if size is None else size
        u = rng.standard_normal((m, self.dim - 1))
        t = np.sqrt(np.sum(self.weights * u * u, axis=1)) + np.abs(rng.standard_normal(m))
        out = np.column_stack([t, u])
        return out[0] if size is None else out

    def to_dict(self):
        return {"kind": "weighted_lorentz", "weights": self.weights.tolist()}


# ---------------------------------------------------------------------------
# the trivial cone


@dataclass(frozen=True)
class ZeroCone(Cone):
    """``{0}``: every order relation collapses to equality."""

    dim: int
    kind = "zero"

    def margin(self, x):
        x = _check_dim(x, self.dim)
        return -np.abs(x).max(axis=-1)

    def project(self, x):
        return np.zeros_like(_check_dim(x, self.dim))

    def dual(self):
        raise NotImplementedError("the dual of {0} is the whole space")

    def interior_point(self):
        return np.zeros(self.dim)

    def sample(self, rng, size=None):
        return np.zeros(self.dim if size is None else (size, self.dim))

    @property
    def is_generating(self) -> bool:
        return False

    def to_dict(self):
        return {"kind": "zero"}


# ---------------------------------------------------------------------------
# polyhedral cones


def _normalize_rows(a):
    a = np.atleast_2d(np.asarray(a, dtype=float))
    nrm = np.linalg.norm(a, axis=1)
    if np.any(nrm == 0):
        raise ValueError("zero row in cone description")
    return a / nrm[:, None]


def _dedupe_directions(rows, tol=1e-9):
    out = []
    for r in rows:
        if not any(np.linalg.norm(r - q) < tol for q in out):
            out.append(r)
    return np.array(out)


def enumerate_dual_rays(rows, tol=1e-9):
    """Extreme rays of ``{x : rows @ x >= 0}`` by brute-force subset enumeration.

    Only meant for small dimensions (n <= 4): every (n-1)-subset of rows is
    intersected, the resulting line is oriented into the cone and kept if it
    satisfies all inequalities.  Assumes the result is a pointed cone.
    """
    a = _normalize_rows(rows)
    m, n = a.shape
    if n > 4:
        raise ValueError("enumeration is limited to dimension <= 4")
    if n == 1:
        cands = np.array([[1.0], [-1.0]])
        return cands[(a @ cands.T >= -tol).all(axis=0)]
    if n == 3:
        i, j = np.triu_indices(m, 1)
        cands = np.cross(a[i], a[j])
    else:
        cands = []
        for sub in itertools.combinations(range(m), n - 1):
            _, s, vt = np.linalg.svd(a[list(sub)])
            if s.size < n - 1 or s[-1] < 1e-10:
                continue
            cands.append(vt[-1])
        cands = np.array(cands).reshape(-1, n)
    nrm = np.linalg.norm(cands, axis=1)
    cands = cands[nrm > 1e-10] / nrm[nrm > 1e-10, None]
    rays = []
    for chunk in np.array_split(cands, max(1, len(cands) // 4096 + 1)):
        vals = a @ chunk.T
        pos = (vals >= -tol).all(axis=0)
        neg = (vals <= tol).all(axis=0)
        rays.append(chunk[pos])
        rays.append(-chunk[neg & ~pos])
    rays = np.vstack(rays) if rays else np.empty((0, n))
    if rays.size == 0:
        return rays
    # dedupe on a rounded key, then exact check
    key = np.round(rays, 7)
    _, idx = np.unique(key, axis=0, return_index=True)
    return _dedupe_directions(rays[np.sort(idx)], 1e-7)


class PolyhedralCone(Cone):
    """Finitely generated cone, given by generators and/or half-space normals.

    ``generators`` are rays ``g`` with the cone ``{sum c_i g_i : c >= 0}``;
    ``halfspaces`` are normals ``a`` with the cone ``{x : a.x >= 0}``.  When
    only one representation is given the other is enumerated on demand
    (dimension <= 4, pointed cones).
    """

    kind = "polyhedral"

    def __init__(self, generators=None, halfspaces=None):
        if generators is None and halfspaces is None:
            raise ValueError("need generators or halfspaces")
        self._gen = None if generators is None else _normalize_rows(generators)
        self._hs = None if halfspaces is None else _normalize_rows(halfspaces)
        dims = {r.shape[1] for r in (self._gen, self._hs) if r is not None}
        if len(dims) != 1:
            raise ValueError("generators and halfspaces differ in dimension")
        self.dim = dims.pop()

    def __repr__(self):
        return f"PolyhedralCone(dim={self.dim}, n_gen={len(self.generators)})"

    def __eq__(self, other):
        if not isinstance(other, PolyhedralCone) or other.dim != self.dim:
            return NotImplemented
        return _same_rows(self.generators, other.generators)

    __hash__ = object.__hash__

    @functools.cached_property
    def generators(self):
        if self._gen is not None:
            return self._gen
        return enumerate_dual_rays(self._hs)

    @functools.cached_property
    def halfspaces(self):
        if self._hs is not None:
            return self._hs
        return enumerate_dual_rays(self._gen)

    def margin(self, x):
        x = _check_dim(x, self.dim)
        return (x @ self.halfspaces.T).min(axis=-1)

    @functools.cached_property
    def _faces3(self):
        """Per-facet ray pairs and the planar dual bases used by ``project`` (n=3)."""
        a, r = self.halfspaces, self.generators
        inc = np.abs(a @ r.T) <= 1e-8
        fac, q1, q2, keep = [], [], [], []
        for i in range(a.shape[0]):
            on = np.flatnonzero(inc[i])
            if on.size < 2:
                continue
            # the two extreme rays of the facet: widest angle
            sub = r[on]
            g = sub @ sub.T
            k, l = np.unravel_index(np.argmin(g), g.shape)
            b = np.stack([sub[k], sub[l]])
            # dual basis inside the facet plane
            q = np.linalg.pinv(b).T
            q1.append(q[0])
            q2.append(q[1])
            fac.append(a[i])
        return np.array(fac), np.array(q1), np.array(q2)

    def project(self, x):
        x = _check_dim(x, self.dim)
        if self.margin(x) >= 0:
            return x.copy()
        if self.dim <= 3:
            return self._project_faces(x)
        return self.project_nnls(x)

    def _project_faces(self, x):
        # candidates: origin, each ray, each facet; the projection is the
        # closest feasible one
        best, best_d = np.zeros_like(x), x @ x
        r = self.generators
        s = r @ x
        if s.size and s.max() > 0:
            k = int(np.argmax(s))
            d = x @ x - s[k] ** 2
            if d < best_d:
                best, best_d = s[k] * r[k], d
        if self.dim == 3:
            a, q1, q2 = self._faces3
            if a.size:
                h = a @ x
                ok = (q1 @ x >= 0) & (q2 @ x >= 0) & (h < 0)
                if ok.any():
                    cand = np.flatnonzero(ok)
                    k = cand[np.argmin(h[cand] ** 2)]
                    d = h[k] ** 2
                    if d < best_d:
                        best, best_d = x - h[k] * a[k], d
        return best

    def project_nnls(self, x):
        """Projection through a nonnegative least-squares problem."""
        x = _check_dim(x, self.dim)
        if self._hs is not None or self._gen is None:
            a = self.halfspaces
            lam, _ = nnls(a.T, -x)
            return x + a.T @ lam
        g = self.generators
        c, _ = nnls(g.T, x)
        return g.T @ c

    def dual(self):
        return PolyhedralCone(generators=self.halfspaces, halfspaces=self.generators)

    def interior_point(self):
        p = self.generators.sum(axis=0)
        return p / np.linalg.norm(p)

    @property
    def is_proper(self):
        # pointed iff some direction is strictly positive on every generator
        return _strictly_separable(self.generators)

    @property
    def is_generating(self):
        return np.linalg.matrix_rank(self.generators) == self.dim and self.halfspaces.size > 0 and \
            _strictly_separable(self.halfspaces)

    def sample(self, rng, size=None):
        g = self.generators
        m = 1 if size is None else size
        c = rng.exponential(size=(m, g.shape[0]))
        # sparse combinations reach the boundary
        c *= rng.random((m, g.shape[0])) < max(0.5, 2.0 / g.shape[0])
        out = c @ g
        return out[0] if size is None else out

    def to_dict(self):
        d = {"kind": "polyhedral"}
        if self._gen is not None:
            d["generators"] = self._gen.tolist()
        if self._hs is not None:
            d["halfspaces"] = self._hs.tolist()
        return d


def _same_rows(a, b, tol=1e-8):
    if a.shape != b.shape:
        return False
    return all(np.min(np.linalg.norm(b - r, axis=1)) < tol for r in a)


def _strictly_separable(rows):
    """True iff some ``d`` has ``rows @ d > 0`` for every row."""
    from scipy.optimize import linprog

    m, n = rows.shape
    # maximise s subject to rows @ d >= s, |d|_inf <= 1
    c = np.zeros(n + 1)
    c[-1] = -1.0
    a_ub = np.hstack([-rows, np.ones((m, 1))])
    res = linprog(c, A_ub=a_ub, b_ub=np.zeros(m), bounds=[(-1, 1)] * n + [(None, 1)])
    return bool(res.status == 0 and -res.fun > 1e-9)


def chebyshev_lobatto(n_points):
    """Chebyshev-Lobatto nodes mapped to [0, 1]; endpoints included."""
    k = np.arange(n_points)
    t = 0.5 * (1.0 - np.cos(np.pi * k / (n_points - 1)))
    t[0], t[-1] = 0.0, 1.0
    return t


@functools.lru_cache(maxsize=8)
def _polynonneg_rays(n_points):
    t = chebyshev_lobatto(n_points)
    a = _normalize_rows(np.stack([t * t, t, np.ones_like(t)], axis=1))
    # rows lie on a convex curve, so the extreme rays of the cut cone come
    # from cyclically adjacent constraints
    i = np.arange(n_points)
    j = np.roll(i, -1)
    r = np.cross(a[i], a[j])
    r *= np.sign((a @ r.T).sum(axis=0))[:, None]
    r /= np.linalg.norm(r, axis=1, keepdims=True)
    assert (a @ r.T >= -1e-9).all()
    return r


class PolyNonnegCone(PolyhedralCone):
    """Coefficients ``(a, b, c)`` with ``a t^2 + b t + c >= 0`` on a grid of [0, 1].

    The grid is Chebyshev-Lobatto nodes, endpoints included.
    """

    kind = "polynonneg"

    def __init__(self, n_points: int = 257):
        if n_points < 3:
            raise ValueError("need at least 3 grid points")
        self.n_points = int(n_points)
        self.grid = chebyshev_lobatto(self.n_points)
        t = self.grid
        super().__init__(halfspaces=np.stack([t * t, t, np.ones_like(t)], axis=1))
        self._gen = _polynonneg_rays(self.n_points)

    def __repr__(self):
        return f"PolyNonnegCone(n_points={self.n_points})"

    def __eq__(self, other):
        if isinstance(other, PolyNonnegCone):
            return other.n_points == self.n_points
        return NotImplemented

    __hash__ = object.__hash__

    def evaluate(self, coeffs, t):
        a, b, c = np.moveaxis(np.asarray(coeffs, dtype=float), -1, 0)
        return a * t * t + b * t + c

    def interior_point(self):
        return np.array([0.0, 0.0, 1.0])

    @property
    def is_proper(self):
        return True

    @property
    def is_generating(self):
        return True

    def dual(self):
        # cone of point evaluations at the grid nodes
        return PolyhedralCone(generators=self._hs, halfspaces=self._gen)

    def to_dict(self):
        return {"kind": "polynonneg", "n_points": self.n_points}


# ---------------------------------------------------------------------------
# Dykstra's alternating projections (reference path)


def dykstra(x, projectors: Sequence[Callable], tol=1e-10, max_iter=100_000):
    """Project ``x`` onto the intersection of convex sets by Dykstra's algorithm.

    Raises ``ConvergenceError`` if the iterates have not settled to ``tol``
    after ``max_iter`` sweeps.
    """
    x = np.asarray(x, dtype=float)
    z = x.copy()
    incr = [np.zeros_like(x) for _ in projectors]
    for it in range(max_iter):
        z_prev = z
        for k, proj in enumerate(projectors):
            y = z + incr[k]
            z_new = proj(y)
            incr[k] = y - z_new
            z = z_new
        if np.linalg.norm(z - z_prev) <= tol * (1.0 + np.linalg.norm(z)):
            return z
    raise ConvergenceError(f"Dykstra did not converge in {max_iter} sweeps")


def halfspace_projectors(normals):
    """Projectors onto ``{x : a.x >= 0}`` for each row ``a`` (unit rows)."""
    normals = _normalize_rows(normals)

    def make(a):
        return lambda y: y - min(0.0, a @ y) * a

    return [make(a) for a in normals]


def dykstra_project(cone: Cone, x, tol=1e-10, max_iter=100_000):
    """Reference projection by Dykstra over a cone's constituent pieces."""
    if isinstance(cone, HalfLorentzCone):
        pieces = [cone.lorentz.project] + halfspace_projectors(cone.half[None, :])
    elif isinstance(cone, PolyhedralCone):
        pieces = halfspace_projectors(cone.halfspaces)
    else:
        pieces = [cone.project]
    return dykstra(x, pieces, tol=tol, max_iter=max_iter)


# ---------------------------------------------------------------------------
# JSON descriptors


def cone_from_dict(d: dict, dim: int | None = None) -> Cone:
    kind = d.get("kind")
    if kind == "standard":
        n = d.get("dim", dim)
        if n is None:
            raise ValueError("standard cone needs a dimension")
        return StandardCone(int(n))
    if kind == "lorentz":
        if "axis" in d:
            return LorentzCone(d["axis"])
        return LorentzCone.standard(int(d.get("dim", dim)))
    if kind == "half_lorentz":
        if "axis" in d:
            return HalfLorentzCone(d["axis"], d["half"])
        return HalfLorentzCone.standard(int(d.get("dim", dim)))
    if kind == "polyhedral":
        return PolyhedralCone(d.get("generators"), d.get("halfspaces"))
    if kind == "polynonneg":
        return PolyNonnegCone(int(d.get("n_points", 257)))
    if kind == "zero":
        n = d.get("dim", dim)
        if n is None:
            raise ValueError("zero cone needs a dimension")
        return ZeroCone(int(n))
    if kind == "weighted_lorentz":
        if "weights" in d:
            return WeightedLorentzCone(d["weights"])
        return WeightedLorentzCone.harmonic(int(d.get("dim", dim)))
    raise ValueError(f"unknown cone kind: {kind!r}")
