import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from conelat.lattice import (
    IDENTITY_NAMES,
    ando_decompose,
    identity_suite,
    neg_part,
    pos_part,
    quasi_abs,
    quasi_inf,
    random_triples,
)
from conelat.solver import NotAQuasiLatticeError, SolverOptions
from conelat.spaces import (
    four_ray_space,
    half_lorentz_space,
    lorentz_space,
    order_leq,
    standard_space,
)

vec3 = arrays(np.float64, 3, elements=st.floats(-10, 10, allow_nan=False, width=64))


def test_standard_cone_parts_are_coordinatewise():
    sp = standard_space(3)
    x = np.array([1.5, -2.0, 0.0])
    np.testing.assert_allclose(pos_part(sp, x), [1.5, 0, 0], atol=1e-12)
    np.testing.assert_allclose(neg_part(sp, x), [0, 2.0, 0], atol=1e-12)
    np.testing.assert_allclose(quasi_abs(sp, x), [1.5, 2.0, 0], atol=1e-12)
    np.testing.assert_allclose(quasi_inf(sp, x, np.zeros(3)), [0, -2.0, 0], atol=1e-12)


def test_lorentz_abs_closed_form_matches_splitting(rng):
    sp = lorentz_space(4)
    for _ in range(10):
        x = rng.standard_normal(4)
        a = quasi_abs(sp, x)
        b = quasi_abs(sp, x, SolverOptions(method="splitting"))
        np.testing.assert_allclose(a, b, atol=1e-6)


@settings(max_examples=60, deadline=None)
@given(vec3)
def test_lorentz_abs_preserves_norm(x):
    a = quasi_abs(lorentz_space(3), x)
    assert abs(np.linalg.norm(a) - np.linalg.norm(x)) <= 1e-9 * (1 + np.linalg.norm(x))
    assert order_leq(lorentz_space(3), x, a, 1e-9) and order_leq(lorentz_space(3), -x, a, 1e-9)


@settings(max_examples=25, deadline=None)
@given(vec3, vec3, st.floats(0.1, 5.0))
def test_half_lorentz_homogeneity(x, y, a):
    sp = half_lorentz_space()
    lhs = quasi_inf(sp, a * x, a * y)
    rhs = a * quasi_inf(sp, x, y)
    assert np.linalg.norm(lhs - rhs) <= 1e-6 * (1 + np.linalg.norm(rhs))


@settings(max_examples=25, deadline=None)
@given(vec3)
def test_parts_decompose(x):
    sp = lorentz_space(3)
    p, m = pos_part(sp, x), neg_part(sp, x)
    np.testing.assert_allclose(p - m, x, atol=1e-7 * (1 + np.linalg.norm(x)))
    assert order_leq(sp, 0 * x, p, 1e-9) and order_leq(sp, 0 * x, m, 1e-9)


@pytest.mark.parametrize(
    "space",
    [standard_space(3), lorentz_space(3), lorentz_space(5), half_lorentz_space(), four_ray_space(2.0)],
    ids=["standard", "lorentz3", "lorentz5", "half", "four-ray-l2"],
)
def test_identity_suite(space):
    worst = 0.0
    for x, y, z in random_triples(space, 15, seed=3):
        rep = identity_suite(space, x, y, z)
        assert rep.applicable, rep.reason
        assert [r.name for r in rep.records] == list(IDENTITY_NAMES)
        worst = max(worst, rep.max_violation)
    assert worst <= 1e-6


def test_identity_suite_reports_non_quasi_lattice():
    sp = standard_space(3, math.inf)
    rep = identity_suite(sp, [1.0, -1.0, 0.0], [0.0, 0.0, 0.0], [0.0, 0.0, 0.0])
    assert not rep.applicable and not rep.passed
    d = rep.to_dict()
    assert d["applicable"] is False and d["reason"]


def test_flat_space_raises_in_algebra():
    with pytest.raises(NotAQuasiLatticeError):
        pos_part(standard_space(3, math.inf), [1.0, -1.0, 0.5])


def test_ando_decompose():
    p, m, ratio = ando_decompose(standard_space(2), [3.0, -4.0])
    np.testing.assert_allclose(p, [3, 0], atol=1e-12)
    np.testing.assert_allclose(m, [0, 4], atol=1e-12)
    assert ratio == pytest.approx(0.8)
    assert ando_decompose(lorentz_space(3), [0.0, 0.0, 0.0])[2] == 0.0
