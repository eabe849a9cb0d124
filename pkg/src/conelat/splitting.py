"""Consensus Douglas-Rachford splitting for ``min sum_i f_i(z)``.

Each ``f_i`` is given through its proximal map ``prox_i(u, gamma)``.  The
product-space iteration is::

    zbar  = mean(w_i)
    x_i   = prox_i(2 zbar - w_i, gamma)
    w_i  += relax * (x_i - zbar)

and stops once every ``x_i`` is within ``tol_primal`` of their mean and the
objective has settled to ``tol_obj``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np


@dataclass
class DRResult:
    z: np.ndarray
    objective: float
    iterations: int
    converged: bool
    residual: float
    fixed_point_step: float


def consensus_dr(
    proxes: Sequence[Callable],
    z0,
    objective: Callable,
    gamma: float = 1.0,
    relax: float = 1.8,
    tol_primal: float = 1e-8,
    tol_obj: float = 1e-10,
    max_iter: int = 100_000,
    check_every: int = 1,
) -> DRResult:
    k = len(proxes)
    z0 = np.asarray(z0, dtype=float)
    w = np.tile(z0, (k, 1))
    xs = np.empty_like(w)
    zbar = z0.copy()
    obj_prev = objective(zbar)
    res = step = np.inf
    settled = 0
    for it in range(1, max_iter + 1):
        v = 2.0 * zbar - w
        for i, prox in enumerate(proxes):
            xs[i] = prox(v[i], gamma)
        d = relax * (xs - zbar)
        w += d
        if it % check_every == 0:
            step = float(np.abs(d).max())
            xbar = xs.mean(axis=0)
            dev = xs - xbar
            res = math.sqrt(float(np.max(np.einsum("ij,ij->i", dev, dev))))
            obj = objective(xbar)
            # two consecutive quiet checks guard against relaxation overshoot
            if res <= tol_primal and abs(obj - obj_prev) <= tol_obj * max(1.0, abs(obj)):
                settled += 1
                if settled >= 2:
                    return DRResult(xbar, obj, it, True, res, step)
            else:
                settled = 0
            obj_prev = obj
        zbar = w.mean(axis=0)
    xbar = xs.mean(axis=0)
    return DRResult(xbar, objective(xbar), max_iter, False, res, step)


def shifted_projector(project: Callable, shift, sign: float = 1.0):
    """Projector onto ``shift + sign*C`` given the projector onto ``C``."""
    shift = np.asarray(shift, dtype=float)
    if sign > 0:
        return lambda u, gamma=None: shift + project(u - shift)
    return lambda u, gamma=None: shift - project(shift - u)


def alternating_polish(z, projectors: Sequence[Callable], sweeps: int = 200, tol: float = 1e-13):
    """Dykstra sweeps pulling a nearly feasible ``z`` into an intersection."""
    z = np.asarray(z, dtype=float).copy()
    incr = [np.zeros_like(z) for _ in projectors]
    for _ in range(sweeps):
        z_prev = z
        for i, proj in enumerate(projectors):
            y = z + incr[i]
            z = proj(y)
            incr[i] = y - z
        if np.linalg.norm(z - z_prev) <= tol * (1.0 + np.linalg.norm(z)):
            break
    return z
