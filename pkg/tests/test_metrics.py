import math

import numpy as np
import pytest

from conelat.metrics import (
    COUNTEREXAMPLE,
    HOLDS,
    Flavor,
    PropertyFlavor,
    conormality_constant_estimate,
    conormality_solve,
    dual_normality_spotcheck,
    normality_check,
    normality_ratio,
    regularity_classify,
    sample_normality_items,
    weighted_cone_witness,
)
from conelat.cones import ZeroCone
from conelat.spaces import (
    OrderedSpace,
    four_ray_space,
    lorentz_space,
    order_leq,
    polynomial_space,
    standard_space,
    weighted_space,
)


def test_partners_are_involutive():
    for f in Flavor:
        assert f.dual_partner.dual_partner is f
        assert f.dual_partner.is_conormal != f.is_conormal
    assert Flavor.MAX_NORMAL.dual_partner is Flavor.SUM_CONORMAL


def test_property_flavor_validation():
    with pytest.raises(ValueError):
        PropertyFlavor("normal", 0.0)
    with pytest.raises(ValueError):
        PropertyFlavor("normal", 1.0, approximate=True)
    assert PropertyFlavor("sum-conormal", 2.0, True).to_dict()["approximate"]


@pytest.mark.parametrize("kind", ["sum-normal", "abs-normal", "normal"])
def test_standard_and_lorentz_are_monotone(kind):
    for sp in (standard_space(3), lorentz_space(3)):
        rep = normality_check(sp, PropertyFlavor(kind, 1.0), sample_normality_items(sp, kind, 300))
        assert rep.verdict == HOLDS, rep.to_dict()
        assert rep.n_checked == 300


def test_standard_max_normality_constant():
    # |x| <= | |z| v |y| | <= sqrt(2) max(|z|, |y|), attained at z=(-1,0), x=(-1,1), y=(0,1)
    sp = standard_space(2)
    items = sample_normality_items(sp, "max-normal", 500) + [([-1, 0], [-1, 1], [0, 1])]
    rep = normality_check(sp, PropertyFlavor("max-normal", math.sqrt(2)), items)
    assert rep.verdict == HOLDS
    assert rep.alpha_lower_bound == pytest.approx(math.sqrt(2))


def test_lorentz_is_not_one_max_normal():
    # z <= x <= y with |x| = sqrt(2) max(|z|, |y|)
    sp = lorentz_space(3)
    z, x, y = np.array([-0.5, 0.5, 0.0]), np.array([0.0, 1.0, 0.0]), np.array([0.5, 0.5, 0.0])
    assert order_leq(sp, z, x) and order_leq(sp, x, y)
    rep = normality_check(sp, PropertyFlavor("max-normal", 1.0), [(z, x, y)])
    assert rep.verdict == COUNTEREXAMPLE
    assert rep.alpha_lower_bound == pytest.approx(math.sqrt(2))


def test_polynomial_space_not_monotone():
    sp = polynomial_space()
    rep = normality_check(sp, PropertyFlavor("normal", 1.0), [([0, -1, 1], [0, 0, 1])])
    assert rep.verdict == COUNTEREXAMPLE
    assert rep.alpha_lower_bound == pytest.approx(math.sqrt(2))


def test_items_failing_hypothesis_are_skipped():
    sp = standard_space(2)
    rep = normality_check(sp, PropertyFlavor("normal", 1.0), [([1, 0], [0, 1]), ([0.5, 0], [1, 1])])
    assert rep.n_skipped == 1 and rep.n_checked == 1
    with pytest.raises(ValueError):
        normality_check(sp, PropertyFlavor("normal", 1.0), [([1, 0], [0, 1])])


@pytest.mark.parametrize("alpha", [1, 2, 4, 8])
def test_weighted_witness(alpha):
    dim = 1602
    sp = weighted_space(dim)
    x, y = weighted_cone_witness(dim, alpha)
    assert order_leq(sp, np.zeros(dim), x) and order_leq(sp, x, y)
    assert np.linalg.norm(x) > alpha * np.linalg.norm(y)


def test_weighted_witness_needs_room():
    with pytest.raises(ValueError):
        weighted_cone_witness(10, 8)


def _standard_closed_form(kind, x):
    p, m = np.maximum(x, 0), np.maximum(-x, 0)
    n = np.linalg.norm
    return {
        "sum-conormal": (n(p) + n(m)) / n(x),
        "max-conormal": max(n(p), n(m)) / n(x),
        "abs-conormal": 1.0,
        "conormal": n(p) / n(x),
    }[kind]


@pytest.mark.parametrize("kind", ["sum-conormal", "max-conormal", "abs-conormal", "conormal"])
def test_conormality_standard_closed_forms(kind, rng):
    sp = standard_space(3)
    for _ in range(5):
        x = rng.standard_normal(3)
        d = conormality_solve(sp, kind, x)
        assert d.ratio == pytest.approx(_standard_closed_form(kind, x), abs=1e-6)


def test_sum_conormal_example():
    d = conormality_solve(standard_space(2), "sum-conormal", [1.0, -1.0])
    np.testing.assert_allclose(d.a, [1, 0], atol=1e-9)
    np.testing.assert_allclose(d.b, [0, 1], atol=1e-9)
    assert d.ratio == pytest.approx(math.sqrt(2))


def test_max_conormal_lorentz_against_socp(rng):
    cp = pytest.importorskip("cvxpy")
    sp = lorentz_space(3)
    for _ in range(4):
        x = rng.standard_normal(3)
        a = cp.Variable(3)
        b = a - x
        prob = cp.Problem(cp.Minimize(cp.maximum(cp.norm(a), cp.norm(b))), [cp.SOC(a[0], a[1:]), cp.SOC(b[0], b[1:])])
        prob.solve(solver="CLARABEL")
        d = conormality_solve(sp, "max-conormal", x)
        assert d.ratio * np.linalg.norm(x) == pytest.approx(prob.value, abs=1e-5)


def test_lorentz_abs_and_plain_conormal_constants_are_one():
    sp = lorentz_space(3)
    for kind in ("abs-conormal", "conormal"):
        est = conormality_constant_estimate(sp, kind, 30, seed=1)
        assert est == pytest.approx(1.0, abs=1e-6)


def test_conormality_rejects_normal_flavor():
    with pytest.raises(ValueError):
        conormality_solve(standard_space(2), "normal", [1.0, 0.0])


def test_regularity_standard_space():
    rep = regularity_classify(standard_space(2), math.sqrt(2) + 1e-6, n_samples=40, seed=0)
    assert all(rep.kinds.values()), rep.to_dict()
    rep = regularity_classify(standard_space(2), 1.0, n_samples=40, seed=0)
    assert rep.kinds["absolute-davies-ng"]
    assert not rep.kinds["ellis-grosberg-krein"]


def test_dual_spotcheck_agrees_on_four_ray():
    chk = dual_normality_spotcheck(four_ray_space(2.0), "abs-normal", 5.0, n_samples=30)
    assert chk.agree


def test_dual_spotcheck_unsupported():
    with pytest.raises(ValueError):
        dual_normality_spotcheck(OrderedSpace(ZeroCone(2)), "normal", 1.0, n_samples=5)
