import json
from fractions import Fraction

import numpy as np
import pytest

from polystab import LoopOperatorError, ValidationError, resolvent_full_schur
from polystab.repro import (REGISTRY, exp_pol_rankone_system, parse_range, resolve_params,
                            run_repro, tri_optimal_curve)


def test_registry_names():
    assert sorted(REGISTRY) == ["coupled-wave", "exp-pol-rankone", "intro-epsilon", "tri-optimal"]


@pytest.mark.parametrize("example_id", sorted(REGISTRY))
def test_examples_pass_with_defaults(example_id):
    report = run_repro(example_id)
    assert report.passed, [e for e in report.expectations if not e.holds]
    d = json.loads(report.to_json())
    assert d["example"] == example_id
    assert d["passed"] is True
    for sweep in d["sweeps"].values():
        assert sweep["window"] and "slope" in sweep["fit"]


def test_intro_epsilon_flags_growth():
    report = run_repro("intro-epsilon")
    assert report.verdict.applicable is None
    assert report.sweeps["coupling_block"].fit.slope > 0.5


@pytest.mark.parametrize("n", [2, 5, 10])
def test_rankone_axis_eigenvalue_matches_oracle(oracles, n):
    report = run_repro("exp-pol-rankone", {"n": n})
    assert report.passed
    eig = report.spectral.eigenvalues
    for re, im in oracles["rankone_axis_eigenvalues"][str(n)]:
        assert np.min(np.abs(eig - complex(re, im))) < 1e-8


def test_rankone_params_as_strings():
    params = resolve_params("exp-pol-rankone", {"alpha2": "5/3", "n": "3"})
    assert params["alpha2"] == Fraction(5, 3) and params["n"] == 3


def test_rankone_n_above_N_rejected():
    with pytest.raises(ValidationError):
        run_repro("exp-pol-rankone", {"n": 10, "N": 5})


def test_unknown_example_and_param():
    with pytest.raises(ValidationError, match="unknown example"):
        run_repro("example-3")
    with pytest.raises(ValidationError, match="unknown parameters"):
        run_repro("tri-optimal", {"beta": 1})
    with pytest.raises(ValidationError, match="out of range"):
        run_repro("tri-optimal", {"alpha": -1})


def test_tri_optimal_bounded_branch():
    report = run_repro("tri-optimal", {"s": 2})
    assert report.passed


def test_tri_optimal_curve_bounded_by_inverse_e():
    ts = np.geomspace(1, 1e4, 300)
    assert np.max(tri_optimal_curve(2.0, 200, 2.0, ts)) <= 1 / np.e + 0.01
    q = tri_optimal_curve(2.0, 200, 1.0, [10.0, 200.0**2 / 2])
    assert q[1] > 5 * q[0]


def test_rankone_structured_resolvent_raises():
    sys = exp_pol_rankone_system(1.0, Fraction(5, 3), 5, 64)
    with pytest.raises(LoopOperatorError):
        resolvent_full_schur(sys, 5j)


def test_parse_range():
    assert parse_range("1:10:5") == (1.0, 10.0, 5)
    for bad in ("1:10", "0:10:5", "5:1:5", "1:10:1", "a:b:c"):
        with pytest.raises(ValidationError):
            parse_range(bad)
