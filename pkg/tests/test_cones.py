import math

import numpy as np
import pytest

from conelat.cones import (
    HalfLorentzCone,
    LorentzCone,
    PolyhedralCone,
    PolyNonnegCone,
    StandardCone,
    WeightedLorentzCone,
    ZeroCone,
    cone_from_dict,
    dykstra_project,
)

CONES = [
    StandardCone(4),
    LorentzCone.standard(4),
    LorentzCone([1.0, 1.0, 0.0]),
    HalfLorentzCone.standard(3),
    WeightedLorentzCone.harmonic(5),
    PolyhedralCone(generators=[[1, 1, 1], [1, -1, 1], [-1, 1, 1], [-1, -1, 1]]),
    PolyNonnegCone(65),
]


@pytest.mark.parametrize("cone", CONES, ids=lambda c: c.kind)
def test_projection_is_moreau(cone, rng):
    # p = P(x) is the projection iff p in C, x - p in the polar cone and <p, x - p> = 0;
    # the polar condition is checked against sampled cone members
    members = np.atleast_2d(cone.sample(rng, 200))
    for _ in range(30):
        x = 2 * rng.standard_normal(cone.dim)
        p = cone.project(x)
        r = x - p
        assert cone.contains(p, 1e-8)
        assert abs(p @ r) <= 1e-7 * (1 + np.linalg.norm(x) ** 2)
        assert np.all(members @ r <= 1e-7 * (1 + np.linalg.norm(members, axis=1) * np.linalg.norm(r)))


@pytest.mark.parametrize("cone", CONES, ids=lambda c: c.kind)
def test_samples_are_members_and_projection_fixes_them(cone, rng):
    s = np.atleast_2d(cone.sample(rng, 50))
    assert np.all(cone.margin(s) >= -1e-9)
    for v in s[:10]:
        np.testing.assert_allclose(cone.project(v), v, atol=1e-8)


def test_lorentz_projection_against_socp(rng):
    cp = pytest.importorskip("cvxpy")
    cone = LorentzCone.standard(4)
    for _ in range(5):
        x = rng.standard_normal(4)
        z = cp.Variable(4)
        cp.Problem(cp.Minimize(cp.sum_squares(z - x)), [cp.SOC(z[0], z[1:])]).solve(solver="CLARABEL")
        np.testing.assert_allclose(cone.project(x), z.value, atol=1e-6)


def test_half_lorentz_projection_matches_dykstra(rng):
    cone = HalfLorentzCone.standard(3)
    for _ in range(20):
        x = rng.standard_normal(3)
        ref = dykstra_project(cone, x, tol=1e-13)
        np.testing.assert_allclose(cone.project(x), ref, atol=1e-6)


def test_membership_examples():
    lor = LorentzCone.standard(3)
    assert lor.contains([1.0, 0.0, 1.0])
    assert not lor.contains([1.0, 0.5, 1.0])
    half = HalfLorentzCone.standard(3)
    assert half.contains([1.0, 0.5, 0.5])
    assert not half.contains([1.0, -0.5, 0.5])
    poly = PolyNonnegCone()
    assert poly.contains([1.0, -2.0, 1.0])  # (1 - t)^2
    assert not poly.contains([0.0, -1.0, 0.5])  # 0.5 - t


def test_negative_tolerance_rejected():
    with pytest.raises(ValueError):
        StandardCone(2).contains([1, 1], tol=-1.0)


def test_self_dual_cones():
    assert StandardCone(3).dual() == StandardCone(3)
    np.testing.assert_allclose(LorentzCone.standard(3).dual().axis, [1, 0, 0])


def test_weighted_dual_inverts_weights():
    w = WeightedLorentzCone([0.5, 0.25])
    np.testing.assert_allclose(w.dual().weights, [2.0, 4.0])


def test_polyhedral_dual_generators_are_halfspaces():
    c = PolyhedralCone(generators=[[1, 1, 1], [1, -1, 1], [-1, 1, 1], [-1, -1, 1]])
    d = c.dual()
    # every dual generator is nonnegative on every primal generator
    assert np.all(d.generators @ c.generators.T >= -1e-12)


def test_zero_cone():
    z = ZeroCone(3)
    assert z.contains([0, 0, 0])
    assert not z.contains([0, 1e-3, 0])
    np.testing.assert_array_equal(z.project([1.0, -2.0, 3.0]), np.zeros(3))
    assert not z.is_generating
    assert cone_from_dict({"kind": "zero"}, 3).dim == 3


@pytest.mark.parametrize("cone", CONES, ids=lambda c: c.kind)
def test_roundtrip(cone):
    d = cone.to_dict()
    back = cone_from_dict(d, cone.dim)
    x = np.linspace(-1, 2, cone.dim)
    assert back.dim == cone.dim
    assert math.isclose(float(np.min(back.margin(x))), float(np.min(cone.margin(x))), abs_tol=1e-12)


@pytest.mark.parametrize("bad", [{"kind": "nope"}, {"kind": "standard"}, {}])
def test_bad_descriptors(bad):
    with pytest.raises(ValueError):
        cone_from_dict(bad)


def test_axis_validation():
    with pytest.raises(ValueError):
        LorentzCone([0.0, 0.0])
    with pytest.raises(ValueError):
        HalfLorentzCone([1.0, 0.0, 0.0], [1.0, 1.0, 0.0])
    with pytest.raises(ValueError):
        WeightedLorentzCone([1.0, -1.0])
