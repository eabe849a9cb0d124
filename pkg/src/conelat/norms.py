"""l^p norms on R^n and the proximal maps of ``gamma * |. - c|_p``."""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np


def _parse_p(p):
    if isinstance(p, str):
        if p.lower() in ("inf", "infinity"):
            return math.inf
        p = float(p)
    p = float(p)
    if not p >= 1:
        raise ValueError(f"norm exponent must lie in [1, inf], got {p}")
    return p


@dataclass(frozen=True)
class NormSpec:
    """The l^p norm, ``1 <= p <= inf``."""

    p: float = 2.0

    def __post_init__(self):
        object.__setattr__(self, "p", _parse_p(self.p))

    @property
    def strictly_convex(self) -> bool:
        return 1 < self.p < math.inf

    @property
    def smooth(self) -> bool:
        return 1 < self.p < math.inf

    @property
    def dual(self) -> "NormSpec":
        if self.p == 1:
            return NormSpec(math.inf)
        if self.p == math.inf:
            return NormSpec(1.0)
        return NormSpec(self.p / (self.p - 1.0))

    def __call__(self, x, axis=-1):
        x = np.asarray(x, dtype=float)
        if self.p == 2 and x.ndim == 1:
            return math.sqrt(x @ x)
        return np.linalg.norm(x, ord=self.p, axis=axis)

    def prox(self, u, gamma, center=None):
        """``argmin_z gamma*|z - center|_p + 0.5*|z - u|_2^2``."""
        u = np.asarray(u, dtype=float)
        if center is None:
            return prox_lp(u, gamma, self.p)
        return center + prox_lp(u - center, gamma, self.p)

    def to_dict(self):
        return {"p": "inf" if self.p == math.inf else self.p}


def project_l1_ball(u, radius):
    """Euclidean projection onto ``{|x|_1 <= radius}`` (sort-based)."""
    a = np.abs(u)
    if a.sum() <= radius:
        return u.copy()
    s = np.sort(a)[::-1]
    cs = np.cumsum(s) - radius
    k = np.arange(1, s.size + 1)
    rho = np.flatnonzero(s - cs / k > 0)[-1]
    theta = cs[rho] / (rho + 1.0)
    return np.sign(u) * np.maximum(a - theta, 0.0)


def prox_lp(u, gamma, p):
    """Prox of ``gamma * |.|_p`` at ``u``."""
    if gamma <= 0:
        return u.copy()
    if p == 2:
        nu = math.sqrt(u @ u)
        if nu <= gamma:
            return np.zeros_like(u)
        return (1.0 - gamma / nu) * u
    if p == 1:
        return np.sign(u) * np.maximum(np.abs(u) - gamma, 0.0)
    if p == math.inf:
        # Moreau: u - P_{gamma B_1}(u)
        return u - project_l1_ball(u, gamma)
    return _prox_lp_general(u, gamma, p)


def _prox_lp_general(u, gamma, p, iters=100):
    """Prox of ``gamma|.|_p`` for ``1 < p < inf`` by nested bisection.

    For ``z != 0`` the optimality condition reads, coordinatewise,
    ``|z_i| + gamma * |z_i|^(p-1) / s^(p-1) = |u_i|`` with ``s = |z|_p``.
    The inner equation is solved for fixed ``s``; the outer one matches
    ``s`` with ``|z(s)|_p``.
    """
    q = p / (p - 1.0)
    if np.linalg.norm(u, ord=q) <= gamma:
        return np.zeros_like(u)
    a = np.abs(u)

    def z_of(s):
        c = gamma / s ** (p - 1.0)
        lo = np.zeros_like(a)
        hi = a.copy()
        for _ in range(iters):
            mid = 0.5 * (lo + hi)
            big = mid + c * mid ** (p - 1.0) > a
            hi = np.where(big, mid, hi)
            lo = np.where(big, lo, mid)
        return 0.5 * (lo + hi)

    # |z(s)|_p - s is decreasing in s; root in (0, |u|_p]
    s_lo, s_hi = 0.0, float(np.linalg.norm(a, ord=p))
    for _ in range(iters):
        s = 0.5 * (s_lo + s_hi)
        if s == 0.0:
            break
        if np.linalg.norm(z_of(s), ord=p) > s:
            s_lo = s
        else:
            s_hi = s
    return np.sign(u) * z_of(0.5 * (s_lo + s_hi))
