from fractions import Fraction

import pytest

from twodist import TwoDistanceParams
from twodist.bounds import (
    barg_upper,
    case_bound_list,
    case_bounds,
    linear_upper,
    lrv_upper,
    parity_feasible,
    sandwich,
    threshold_estimate,
)
from twodist.packings import d_polynomial_lower


def P(n, d1, d2):
    return TwoDistanceParams(n, d1, d2)


def test_barg_and_lrv():
    assert barg_upper(6) == 16
    assert barg_upper(7) == 22
    with pytest.raises(ValueError):
        barg_upper(5)
    assert lrv_upper(6) == 28
    assert lrv_upper(7) == 36
    for n in range(6, 1001):
        assert barg_upper(n) < lrv_upper(n)


def test_linear_upper():
    assert linear_upper(P(10, 2, 5)) == 11
    assert linear_upper(P(10, 4, 7)) == 11
    assert linear_upper(P(10, 3, 6)) == 12
    assert linear_upper(P(10, 4, 6)) is None


def test_parity():
    assert not parity_feasible(P(10, 3, 5))
    assert parity_feasible(P(10, 4, 6))
    assert parity_feasible(P(10, 3, 6))


def test_case_bounds_d4():
    got = {c.case_id: (c.expression, v) for c, v in case_bounds(4, 302)}
    assert got == {
        "max_weight_top": ("240", 240),
        "intermediate_1": ("420", 420),
        "near_minimum": ("50(n-1)", 15050),
    }


def test_case_bounds_d6():
    got = [(c.case_id, c.expression) for c in case_bound_list(6)]
    assert got == [
        ("max_weight_top", "770"),
        ("intermediate_1", "1050"),
        ("intermediate_2", "1960"),
        ("near_minimum", "140n + 210"),
    ]
    vals = dict((c.case_id, v) for c, v in case_bounds(6, 10))
    assert vals["near_minimum"] == 1610


def test_case_bounds_unsupported():
    with pytest.raises(ValueError):
        case_bounds(8, 10)
    with pytest.raises(ValueError):
        case_bound_list(5)
    # general even d still yields d/2 + 1 cases
    assert len(case_bound_list(8)) == 5


@pytest.mark.parametrize("d, expected", [(4, 302), (6, 1685)])
def test_threshold(d, expected):
    r = threshold_estimate(d)
    assert r.threshold == expected
    assert r.kind == "upper_estimate"
    assert r.binding_case == "near_minimum"
    bounds = case_bound_list(d)
    below = r.threshold - 1
    assert any(c.value(below) >= d_polynomial_lower(d, below) for c in bounds)
    for n in range(r.threshold, r.threshold + 10_001):
        low = d_polynomial_lower(d, n)
        assert all(c.value(n) < low for c in bounds)


def test_threshold_constants_cross_early():
    r = threshold_estimate(4)
    cross = {c.case.case_id: c.crossover for c in r.cases}
    assert cross["max_weight_top"] < 60 and cross["intermediate_1"] < 60
    assert r.as_dict()["cases"][2]["bound"] == "50(n-1)"


def test_sandwich_examples():
    s = sandwich(P(7, 4, 6))
    assert (s.lower, s.upper) == (7, 22)
    s = sandwich(P(13, 6, 8))
    assert (s.lower, s.upper) == (13, 79)
    s = sandwich(P(10, 2, 5))
    assert (s.upper, s.upper_source) == (11, "linear")
    assert sandwich(P(6, 3, 5)).feasible is False


def test_sandwich_greedy_fallback():
    s = sandwich(P(12, 8, 10), seed=0)
    assert s.lower_source.startswith("greedy")
    assert s.lower <= s.upper


def test_sandwich_ordered():
    for n in range(6, 40):
        for d in (2, 4, 6):
            if d + 2 <= n:
                s = sandwich(P(n, d, d + 2))
                assert s.lower <= s.upper, (n, d)


def test_exactness_no_floats():
    for c in case_bound_list(6):
        assert isinstance(c.slope, Fraction) and isinstance(c.intercept, Fraction)
