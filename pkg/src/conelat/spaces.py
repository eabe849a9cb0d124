"""Ordered finite-dimensional Banach spaces ``(R^n, |.|_p, C)``."""
from __future__ import annotations

import json
import math
from dataclasses import dataclass

import numpy as np

from .cones import (
    DEFAULT_TOL,
    Cone,
    HalfLorentzCone,
    LorentzCone,
    PolyhedralCone,
    PolyNonnegCone,
    StandardCone,
    WeightedLorentzCone,
    cone_from_dict,
)
from .norms import NormSpec


@dataclass(frozen=True)
class OrderedSpace:
    """``R^n`` with an l^p norm and the order ``x <= y  iff  y - x in cone``.

    ``monotone_hint`` records whether ``0 <= x <= y`` implies ``|x| <= |y|``
    when that is known for the family; ``None`` means unknown.
    """

    cone: Cone
    norm: NormSpec = NormSpec(2.0)
    monotone_hint: bool | None = None

    def __post_init__(self):
        if not isinstance(self.norm, NormSpec):
            object.__setattr__(self, "norm", NormSpec(self.norm))
        if self.monotone_hint is None:
            object.__setattr__(self, "monotone_hint", _known_monotone(self.cone, self.norm))

    @property
    def dim(self) -> int:
        return self.cone.dim

    @property
    def proper(self) -> bool:
        return self.cone.is_proper

    @property
    def generating(self) -> bool:
        return self.cone.is_generating

    @property
    def strictly_convex(self) -> bool:
        return self.norm.strictly_convex

    @property
    def smooth(self) -> bool:
        return self.norm.smooth

    def vec(self, x):
        x = np.asarray(x, dtype=float)
        if x.shape != (self.dim,):
            raise ValueError(f"expected a vector of length {self.dim}, got shape {x.shape}")
        return x

    def dual_space(self) -> "OrderedSpace":
        """Same R^n with the dual exponent and the dual cone."""
        return OrderedSpace(dual_cone(self.cone), self.norm.dual)

    def to_dict(self) -> dict:
        return {"dim": self.dim, "norm": self.norm.to_dict(), "cone": self.cone.to_dict()}

    @classmethod
    def from_dict(cls, d: dict) -> "OrderedSpace":
        return space_from_dict(d)


def _known_monotone(cone, norm):
    if isinstance(cone, StandardCone):
        return True
    if isinstance(cone, (LorentzCone, HalfLorentzCone)) and norm.p == 2:
        # the half cone sits inside a Lorentz cone, which is monotone under l^2
        return True
    if isinstance(cone, (PolyNonnegCone, WeightedLorentzCone)) and norm.p == 2:
        return False
    return None


# ---------------------------------------------------------------------------
# constructors


def standard_space(n: int, p=2.0) -> OrderedSpace:
    return OrderedSpace(StandardCone(n), NormSpec(p))


def lorentz_space(n: int, axis=None, p=2.0) -> OrderedSpace:
    cone = LorentzCone.standard(n) if axis is None else LorentzCone(axis)
    return OrderedSpace(cone, NormSpec(p))


def half_lorentz_space(n: int = 3, p=2.0) -> OrderedSpace:
    return OrderedSpace(HalfLorentzCone.standard(n), NormSpec(p))


def four_ray_space(p=math.inf) -> OrderedSpace:
    """R^3 with the cone spanned by the rays ``(+-1, +-1, 1)``."""
    rays = [[1, 1, 1], [1, -1, 1], [-1, 1, 1], [-1, -1, 1]]
    return OrderedSpace(PolyhedralCone(generators=rays), NormSpec(p))


def polynomial_space(n_points: int = 257) -> OrderedSpace:
    return OrderedSpace(PolyNonnegCone(n_points), NormSpec(2.0))


def weighted_space(n: int) -> OrderedSpace:
    """Truncated weighted cone ``x_1 >= (sum_{m>=2} x_m^2 / m)^{1/2}`` in R^n."""
    return OrderedSpace(WeightedLorentzCone.harmonic(n), NormSpec(2.0))


# ---------------------------------------------------------------------------
# operations


def cone_contains(cone: Cone, x, tol=DEFAULT_TOL) -> bool:
    return cone.contains(x, tol)


def cone_project(cone: Cone, x):
    return cone.project(np.asarray(x, dtype=float))


def dual_cone(cone: Cone) -> Cone:
    return cone.dual()


def order_leq(space: OrderedSpace, x, y, tol=DEFAULT_TOL) -> bool:
    """``x <= y`` in the order of ``space`` (``y - x`` in the cone, relaxed by ``tol``)."""
    return space.cone.contains(space.vec(y) - space.vec(x), tol)


def order_residual(space: OrderedSpace, x, y) -> float:
    """How far ``x <= y`` is from holding: ``max(0, -margin(y - x))``."""
    return max(0.0, -float(space.cone.margin(space.vec(y) - space.vec(x))))


def upper_bound_any(space: OrderedSpace, x, y):
    """Some common upper bound of ``x`` and ``y``.

    Standard cone: the coordinatewise maximum.  Otherwise ``x + lam*e`` with
    ``e`` an interior point of the cone and ``lam`` the smallest (up to a
    small safety factor) value putting ``x + lam*e - y`` in the cone.
    """
    if not space.generating:
        raise ValueError("cone is not generating: upper bounds need not exist")
    x, y = space.vec(x), space.vec(y)
    cone = space.cone
    if isinstance(cone, StandardCone):
        return np.maximum(x, y)
    e = cone.interior_point()
    w = x - y
    if cone.margin(w) >= 0:
        return x.copy()
    hi = 1.0
    while cone.margin(w + hi * e) < 0:
        hi *= 2.0
        if hi > 1e300:
            raise ValueError("could not find an upper bound")
    lo = 0.0
    for _ in range(80):
        mid = 0.5 * (lo + hi)
        if cone.margin(w + mid * e) >= 0:
            hi = mid
        else:
            lo = mid
    return x + hi * (1.0 + 1e-12) * e


def check_proper(space: OrderedSpace, rng, n_samples=200, tol=1e-7) -> bool:
    """Numerical properness: no sampled non-zero ``x`` has both ``x`` and ``-x`` in the cone.

    Samples cone members and tests their negatives.
    """
    s = np.atleast_2d(space.cone.sample(rng, n_samples))
    s = s[np.linalg.norm(s, axis=1) > 1e-6]
    s /= np.linalg.norm(s, axis=1, keepdims=True)
    return not np.any(space.cone.margin(-s) >= -tol)


def check_generating(space: OrderedSpace, rng, n_samples=50, tol=1e-7) -> bool:
    """Numerical generating test: random ``x`` decomposes as ``a - b`` with ``a, b`` in the cone."""
    for _ in range(n_samples):
        x = rng.standard_normal(space.dim)
        try:
            a = upper_bound_any(space, x, np.zeros(space.dim))
        except ValueError:
            return False
        b = a - x
        if not (space.cone.contains(a, tol) and space.cone.contains(b, tol)):
            return False
    return True


# ---------------------------------------------------------------------------
# JSON


def space_from_dict(d: dict) -> OrderedSpace:
    if not isinstance(d, dict):
        raise ValueError("space descriptor must be an object")
    dim = d.get("dim")
    if dim is not None and (not isinstance(dim, int) or dim < 1):
        raise ValueError("dim must be a positive integer")
    norm = d.get("norm", {"p": 2})
    if not isinstance(norm, dict) or "p" not in norm:
        raise ValueError("norm must be an object with key 'p'")
    cone_d = d.get("cone")
    if not isinstance(cone_d, dict):
        raise ValueError("cone must be an object")
    cone = cone_from_dict(cone_d, dim)
    if dim is not None and cone.dim != dim:
        raise ValueError(f"cone dimension {cone.dim} does not match dim {dim}")
    return OrderedSpace(cone, NormSpec(norm["p"]), d.get("monotone_hint"))


def load_space(path) -> OrderedSpace:
    with open(path) as fh:
        return space_from_dict(json.load(fh))
