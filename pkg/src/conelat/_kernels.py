"""Compiled splitting loop for l^2 problems over standard and Lorentz-type cones.

Same iteration as :func:`conelat.splitting.consensus_dr` with the four
blocks of the canonical problem ``min |z - w| + |z|`` over ``(w + C) ∩ C``
inlined, which removes the Python call overhead per block.
"""
from __future__ import annotations

import math

import numpy as np
from numba import njit

from .cones import HalfLorentzCone, LorentzCone, StandardCone

STANDARD, LORENTZ, HALF_LORENTZ = 0, 1, 2


def cone_code(cone):
    if isinstance(cone, StandardCone):
        return STANDARD
    if isinstance(cone, LorentzCone):
        return LORENTZ
    if isinstance(cone, HalfLorentzCone):
        return HALF_LORENTZ
    return -1


def cone_params(cone, n):
    axis = np.zeros(n)
    half = np.zeros(n)
    if isinstance(cone, (LorentzCone, HalfLorentzCone)):
        axis = cone.axis.astype(float)
    if isinstance(cone, HalfLorentzCone):
        half = cone.half.astype(float)
    return axis, half


@njit(cache=True)
def _dot(a, b):
    s = 0.0
    for i in range(a.shape[0]):
        s += a[i] * b[i]
    return s


@njit(cache=True)
def _lorentz(x, axis, out):
    t = _dot(x, axis)
    s = 0.0
    for i in range(x.shape[0]):
        u = x[i] - t * axis[i]
        s += u * u
    nu = math.sqrt(s)
    if nu <= t:
        out[:] = x
    elif nu <= -t:
        out[:] = 0.0
    else:
        c = 0.5 * (t + nu)
        for i in range(x.shape[0]):
            out[i] = c * (axis[i] + (x[i] - t * axis[i]) / nu)


@njit(cache=True)
def project(kind, x, axis, half, out):
    if kind == 0:
        for i in range(x.shape[0]):
            out[i] = x[i] if x[i] > 0.0 else 0.0
    elif kind == 1:
        _lorentz(x, axis, out)
    else:
        _lorentz(x, axis, out)
        if _dot(out, half) < 0.0:
            hx = _dot(x, half)
            _lorentz(x - hx * half, axis, out)


@njit(cache=True)
def _shrink(u, gamma, center, out):
    s = 0.0
    for i in range(u.shape[0]):
        d = u[i] - center[i]
        s += d * d
    nu = math.sqrt(s)
    if nu <= gamma:
        out[:] = center
    else:
        f = 1.0 - gamma / nu
        for i in range(u.shape[0]):
            out[i] = center[i] + f * (u[i] - center[i])


@njit(cache=True)
def _objective(z, w):
    a = 0.0
    b = 0.0
    for i in range(z.shape[0]):
        a += (z[i] - w[i]) ** 2
        b += z[i] * z[i]
    return math.sqrt(a) + math.sqrt(b)


@njit(cache=True)
def dr_canonical(w, z0, kind, axis, half, gamma, relax, tol_primal, tol_obj, max_iter):
    n = w.shape[0]
    zero = np.zeros(n)
    W = np.empty((4, n))
    for k in range(4):
        W[k] = z0
    X = np.empty((4, n))
    zbar = z0.copy()
    v = np.empty(n)
    tmp = np.empty(n)
    obj_prev = _objective(zbar, w)
    res = np.inf
    step = np.inf
    settled = 0
    xbar = np.empty(n)
    for it in range(1, max_iter + 1):
        for k in range(4):
            for i in range(n):
                v[i] = 2.0 * zbar[i] - W[k, i]
            if k == 0:
                _shrink(v, gamma, w, tmp)
            elif k == 1:
                _shrink(v, gamma, zero, tmp)
            elif k == 2:
                project(kind, v - w, axis, half, tmp)
                for i in range(n):
                    tmp[i] += w[i]
            else:
                project(kind, v, axis, half, tmp)
            X[k] = tmp
        step = 0.0
        for k in range(4):
            for i in range(n):
                d = relax * (X[k, i] - zbar[i])
                W[k, i] += d
                if abs(d) > step:
                    step = abs(d)
        for i in range(n):
            xbar[i] = 0.25 * (X[0, i] + X[1, i] + X[2, i] + X[3, i])
        res = 0.0
        for k in range(4):
            s = 0.0
            for i in range(n):
                s += (X[k, i] - xbar[i]) ** 2
            if s > res:
                res = s
        res = math.sqrt(res)
        obj = _objective(xbar, w)
        if res <= tol_primal and abs(obj - obj_prev) <= tol_obj * max(1.0, abs(obj)):
            settled += 1
            if settled >= 2:
                return xbar.copy(), obj, it, True, res, step
        else:
            settled = 0
        obj_prev = obj
        for i in range(n):
            zbar[i] = 0.25 * (W[0, i] + W[1, i] + W[2, i] + W[3, i])
    return xbar.copy(), _objective(xbar, w), max_iter, False, res, step


@njit(cache=True)
def polish_canonical(z, w, kind, axis, half, sweeps, tol):
    """Dykstra sweeps onto ``(w + C) ∩ C``."""
    n = z.shape[0]
    z = z.copy()
    p = np.zeros(n)
    q = np.zeros(n)
    tmp = np.empty(n)
    for _ in range(sweeps):
        prev = z.copy()
        y = z + p
        project(kind, y - w, axis, half, tmp)
        z = tmp + w
        p = y - z
        y = z + q
        project(kind, y, axis, half, tmp)
        z = tmp.copy()
        q = y - z
        d = 0.0
        s = 0.0
        for i in range(n):
            d += (z[i] - prev[i]) ** 2
            s += z[i] * z[i]
        if math.sqrt(d) <= tol * (1.0 + math.sqrt(s)):
            break
    return z
