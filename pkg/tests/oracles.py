"""Reference computations that share no code with the package."""
import math

import numpy as np


def jacobi_singular_values(a, sweeps=60):
    """One-sided Jacobi rotations on the columns of ``a``."""
    u = np.array(a, dtype=float).copy()
    n = u.shape[1]
    for _ in range(sweeps):
        off = 0.0
        for i in range(n - 1):
            for j in range(i + 1, n):
                alpha = u[:, i] @ u[:, i]
                beta = u[:, j] @ u[:, j]
                gamma = u[:, i] @ u[:, j]
                if abs(gamma) <= 1e-15 * math.sqrt(alpha * beta) or alpha * beta == 0.0:
                    continue
                off = max(off, abs(gamma) / math.sqrt(alpha * beta))
                zeta = (beta - alpha) / (2 * gamma)
                t = math.copysign(1.0, zeta) / (abs(zeta) + math.hypot(1.0, zeta))
                c = 1 / math.sqrt(1 + t * t)
                s = c * t
                ui = u[:, i].copy()
                u[:, i] = c * ui - s * u[:, j]
                u[:, j] = s * ui + c * u[:, j]
        if off < 1e-15:
            break
    return np.sort(np.linalg.norm(u, axis=0))[::-1]


def _cone_constraints(cp, kind, z, params):
    if kind == "standard":
        return [z >= 0]
    if kind == "lorentz":
        return [cp.SOC(z[0], z[1:])]
    if kind == "half_lorentz":
        return [cp.SOC(z[0], z[1:]), z[1] >= 0]
    if kind == "halfspaces":
        return [params @ z >= 0]
    raise ValueError(kind)


def socp_quasi_sup(kind, x, y, params=None):
    """Minimize ``|z-x|_2 + |z-y|_2`` over ``z - x, z - y`` in the cone with a conic solver.

    Cones use axis ``e_1`` (and half-space ``e_2 >= 0`` for the half cone).
    """
    import cvxpy as cp

    n = len(x)
    z = cp.Variable(n)
    cons = _cone_constraints(cp, kind, z - x, params) + _cone_constraints(cp, kind, z - y, params)
    prob = cp.Problem(cp.Minimize(cp.norm(z - x, 2) + cp.norm(z - y, 2)), cons)
    prob.solve(solver="CLARABEL", tol_gap_abs=1e-10, tol_gap_rel=1e-10, tol_feas=1e-10)
    return np.asarray(z.value), prob.value


def lorentz_membership(z, axis):
    t = z @ axis
    return t - np.linalg.norm(z - t * axis)


def sphere_points(n, k, rng):
    v = rng.standard_normal((k, n))
    return v / np.linalg.norm(v, axis=1, keepdims=True)
