import json

import pytest

from conelat.harness import PAPER, REGISTRY, run_all, run_example


@pytest.mark.parametrize("case_id", sorted(REGISTRY))
def test_registered_case_passes(case_id):
    rep = run_example(case_id)
    assert rep.passed, rep.to_dict()
    assert rep.tag == PAPER
    d = rep.to_dict()
    assert set(d) >= {"case_id", "pass", "deviations", "runtime_ms"}
    json.dumps(d, allow_nan=False)


def test_case_tolerances():
    assert REGISTRY["ex-5.10"].tol == 1e-6
    assert REGISTRY["ex-5.11"].tol == 1e-4 and REGISTRY["ex-5.13"].tol == 1e-4


def test_ex_5_10_deviation_small():
    rep = run_example("ex-5.10")
    assert rep.deviations["sup-closed_form"] < 1e-6 and rep.deviations["sup-splitting"] < 1e-6


def test_ex_5_11_kappa():
    assert run_example("ex-5.11").deviations["kappa"] < 1e-6


def test_unknown_case():
    with pytest.raises(KeyError):
        run_example("bogus")
    with pytest.raises(KeyError):
        run_all(only=["bogus"])


def test_empty_filter():
    rep = run_all(only=[])
    assert rep.cases == [] and rep.passed and rep.exit_code == 0


@pytest.mark.parametrize("seed", [0, 1, 2])
def test_property_suites_across_seeds(seed):
    rep = run_all(seed, only=["identities-lorentz3", "identities-half-lorentz3", "operators-absolutely-monotone"],
                  n_identity=30, n_monotone=200)
    assert rep.all_passed, rep.to_dict()


def test_timings_can_be_dropped():
    d = run_all(only=["ex-5.10"], properties=False).to_dict(timings=False)
    assert "runtime_ms" not in d["cases"][0]
