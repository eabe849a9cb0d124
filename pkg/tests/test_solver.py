import math

import numpy as np
import pytest

from conelat.cones import ZeroCone
from conelat.solver import (
    GridSpec,
    SolverOptions,
    Status,
    brute_force_quasi_sup,
    clear_cache,
    is_minimal_upper_bound,
    quasi_sup,
    sigma,
)
from conelat.spaces import (
    OrderedSpace,
    four_ray_space,
    half_lorentz_space,
    lorentz_space,
    order_leq,
    polynomial_space,
    standard_space,
)
from oracles import socp_quasi_sup

ORACLE_KIND = {
    "standard": (standard_space(3), "standard"),
    "lorentz": (lorentz_space(3), "lorentz"),
    "half": (half_lorentz_space(), "half_lorentz"),
}


@pytest.mark.parametrize("family", list(ORACLE_KIND))
def test_matches_conic_solver(family, rng):
    pytest.importorskip("cvxpy")
    sp, kind = ORACLE_KIND[family]
    for _ in range(8):
        x, y = rng.standard_normal((2, 3))
        r = quasi_sup(sp, x, y)
        z_ref, val_ref = socp_quasi_sup(kind, x, y)
        assert r.unique
        assert r.sigma_value == pytest.approx(val_ref, abs=1e-6)
        np.testing.assert_allclose(r.z, z_ref, atol=1e-4)


def test_matches_conic_solver_four_ray_l2(rng):
    pytest.importorskip("cvxpy")
    sp = four_ray_space(2.0)
    hs = sp.cone.halfspaces
    for _ in range(5):
        x, y = rng.standard_normal((2, 3))
        r = quasi_sup(sp, x, y)
        z_ref, val_ref = socp_quasi_sup("halfspaces", x, y, hs)
        assert r.sigma_value == pytest.approx(val_ref, abs=1e-6)
        np.testing.assert_allclose(r.z, z_ref, atol=1e-4)


def test_closed_form_and_splitting_agree_on_lorentz(rng):
    for n in (2, 3, 5, 8):
        sp = lorentz_space(n)
        for _ in range(5):
            x, y = rng.standard_normal((2, n))
            a = quasi_sup(sp, x, y, SolverOptions(method="closed_form"))
            b = quasi_sup(sp, x, y, SolverOptions(method="splitting"))
            assert a.method == "closed_form" and b.method != "closed_form"
            np.testing.assert_allclose(a.z, b.z, atol=1e-6)


def test_example_icecream():
    sp = lorentz_space(3)
    r = quasi_sup(sp, [0, 0, 0], [0, 0, 2])
    np.testing.assert_allclose(r.z, [1, 0, 1], atol=1e-12)
    assert r.status is Status.UNIQUE
    assert r.sigma_value == pytest.approx(2 * math.sqrt(2))


def test_standard_cone_l2_is_coordinatewise_max(rng):
    sp = standard_space(4)
    for _ in range(10):
        x, y = rng.standard_normal((2, 4))
        np.testing.assert_allclose(quasi_sup(sp, x, y).z, np.maximum(x, y), atol=1e-10)


def test_symmetry_and_comparable_pairs(rng):
    sp = half_lorentz_space()
    x, y = rng.standard_normal((2, 3))
    np.testing.assert_allclose(quasi_sup(sp, x, y).z, quasi_sup(sp, y, x).z, atol=1e-12)
    # y <= x gives x
    u = x + sp.cone.interior_point()
    np.testing.assert_allclose(quasi_sup(sp, x, u).z, u, atol=1e-9)
    np.testing.assert_allclose(quasi_sup(sp, x, x).z, x)


def test_flat_minimum_linf_standard():
    sp = standard_space(3, math.inf)
    x, y = np.array([1.0, -1.0, 0.0]), np.zeros(3)
    r = quasi_sup(sp, x, y)
    assert r.status is Status.FLAT_MINIMUM
    assert len(r.witnesses) >= 2
    for w in r.witnesses:
        assert sigma(x, y, w, sp.norm) == pytest.approx(2.0, abs=1e-6)
        assert order_leq(sp, x, w, 1e-7) and order_leq(sp, y, w, 1e-7)
    spread = max(np.linalg.norm(a - b) for a in r.witnesses for b in r.witnesses)
    assert spread > 1e-3


def test_flat_minimum_four_ray():
    sp = four_ray_space()
    r = quasi_sup(sp, [0, 0, 0], [2, 0, 0])
    assert r.status is Status.FLAT_MINIMUM
    for w in r.witnesses:
        assert sigma([0, 0, 0], [2, 0, 0], w, sp.norm) == pytest.approx(2.0, abs=1e-6)


def test_infeasible_when_cone_not_generating():
    sp = OrderedSpace(ZeroCone(2))
    r = quasi_sup(sp, [1.0, 0.0], [0.0, 1.0])
    assert r.status is Status.INFEASIBLE
    assert math.isinf(r.sigma_value)
    assert r.to_dict()["sigma"] is None


def test_max_iter_status():
    sp = half_lorentz_space()
    r = quasi_sup(sp, [0.3, -1.0, 2.0], [0.0, 1.0, -0.5], SolverOptions(max_iter=3, engine="python"))
    assert r.status is Status.MAX_ITER


def test_python_and_compiled_engines_agree(rng):
    sp = half_lorentz_space()
    for _ in range(3):
        x, y = rng.standard_normal((2, 3))
        a = quasi_sup(sp, x, y)
        b = quasi_sup(sp, x, y, SolverOptions(engine="python"))
        np.testing.assert_allclose(a.z, b.z, atol=1e-7)
        assert a.iterations == b.iterations


def test_deterministic_and_cache_transparent(rng):
    sp = polynomial_space()
    x, y = rng.standard_normal((2, 3))
    a = quasi_sup(sp, x, y).to_dict()
    clear_cache()
    b = quasi_sup(sp, x, y).to_dict()
    assert a == b


def test_translation_and_scaling_equivariance(rng):
    sp = four_ray_space(2.0)
    x, y, t = rng.standard_normal((3, 3))
    base = quasi_sup(sp, x, y).z
    np.testing.assert_allclose(quasi_sup(sp, x + t, y + t).z, base + t, atol=1e-6)
    np.testing.assert_allclose(quasi_sup(sp, 3 * x, 3 * y).z, 3 * base, atol=1e-6)


def test_rejects_bad_input():
    sp = lorentz_space(3)
    with pytest.raises(ValueError):
        quasi_sup(sp, [0, 0], [0, 0, 1])
    with pytest.raises(ValueError):
        quasi_sup(sp, [0, 0, math.nan], [0, 0, 1])


def test_options_validation():
    with pytest.raises(ValueError):
        SolverOptions.from_dict({"bogus": 1})
    with pytest.raises(ValueError):
        SolverOptions(method="magic")
    o = SolverOptions.from_dict({"relax": 1.5})
    assert SolverOptions.from_dict(o.to_dict()) == o


# ---------------------------------------------------------------------------
# minimality


def test_minimal_bounds_on_the_hyperbola():
    sp = lorentz_space(3)
    for t in (-1.5, 0.0, 0.7):
        z = np.array([math.sqrt(t * t + 1), t, 1.0])
        assert is_minimal_upper_bound(sp, [0, 0, 0], [0, 0, 2], z).minimal


def test_non_minimal_bound_has_witness():
    sp = lorentz_space(3)
    z = np.array([3.0, 0.0, 1.0])
    m = is_minimal_upper_bound(sp, [0, 0, 0], [0, 0, 2], z)
    assert not m.minimal
    smaller = m.smaller_bound
    assert order_leq(sp, [0, 0, 0], smaller, 1e-6) and order_leq(sp, [0, 0, 2], smaller, 1e-6)
    assert order_leq(sp, smaller, z, 1e-6)


def test_minimality_standard_cone():
    sp = standard_space(3)
    assert is_minimal_upper_bound(sp, [1, 0, 0], [0, 1, 0], [1, 1, 0]).minimal
    assert not is_minimal_upper_bound(sp, [1, 0, 0], [0, 1, 0], [1, 1, 0.5]).minimal


def test_minimality_requires_upper_bound():
    with pytest.raises(ValueError):
        is_minimal_upper_bound(lorentz_space(3), [0, 0, 0], [0, 0, 2], [0, 0, 0])


# ---------------------------------------------------------------------------
# grid oracle


def test_oracle_finds_icecream_value():
    r = brute_force_quasi_sup(lorentz_space(3), [0, 0, 0], [0, 0, 2])
    assert np.linalg.norm(r.z - [1, 0, 1]) <= 2 * r.grid_step
    assert r.status is Status.UNIQUE


def test_oracle_detects_flat_minimum():
    r = brute_force_quasi_sup(four_ray_space(), [0, 0, 0], [2, 0, 0])
    assert r.status is Status.FLAT_MINIMUM


def test_oracle_rejects_large_dimension():
    with pytest.raises(ValueError):
        brute_force_quasi_sup(standard_space(5), np.zeros(5), np.ones(5))


def test_oracle_coarse_grid_respects_grid(rng):
    sp = standard_space(2)
    x, y = rng.standard_normal((2, 2))
    r = brute_force_quasi_sup(sp, x, y, GridSpec(points=41, levels=6))
    assert np.linalg.norm(r.z - np.maximum(x, y)) <= 2 * r.grid_step
