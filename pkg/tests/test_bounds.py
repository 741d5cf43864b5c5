import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from otpolar import bounds
from otpolar.bounds import (
    Grid,
    MethodId,
    appendix_entropy_recursion,
    binary_entropy,
    crossovers,
    extension_bound,
    hybrid_bound,
    interactive_ska_bound_n4,
    polar_bound,
    polar_terms,
    prop1_derivative_check,
    prop1_f,
    recursive_bsec_bound,
    ska_terms_n4,
    sweep,
    upper_bound,
)
from otpolar.channels import polar_round_stats


def test_binary_entropy_endpoints():
    assert binary_entropy(0.0) == 0.0
    assert binary_entropy(1.0) == 0.0
    assert binary_entropy(0.5) == pytest.approx(1.0)


def test_golden_values():
    assert recursive_bsec_bound(0.1, 5) == pytest.approx(0.08531820605195452, abs=1e-12)
    assert recursive_bsec_bound(0.45, 3) == pytest.approx(0.007183474087483357, abs=1e-12)
    assert hybrid_bound(0.45, 3, 4) == pytest.approx(0.007183483688994839, abs=1e-12)


def test_extension_closed_form():
    q = 0.2
    p1 = 2 * q * (1 - q)
    q1 = q * q / (q * q + (1 - q) ** 2)
    assert extension_bound(q) == pytest.approx(p1 / 2 * (1 - binary_entropy(q1)), abs=1e-14)


def test_recursive_is_monotone_in_rounds():
    vals = [recursive_bsec_bound(0.15, t) for t in range(1, 8)]
    assert all(b >= a - 1e-15 for a, b in zip(vals, vals[1:]))


@pytest.mark.parametrize("q", [0.0, 0.5, 1.0])
@pytest.mark.parametrize("method", ["extension", "recursive:4", "polar:3", "ska", "hybrid:2:2"])
def test_zero_at_degenerate_points(q, method):
    assert MethodId.parse(method).evaluate(q) == 0.0


@pytest.mark.parametrize("q", [0.05, 0.3, 0.45])
def test_polar_bound_is_sum_of_nonnegative_terms(q):
    terms = polar_terms(q, 4)
    assert all(t >= 0.0 for t in terms)
    assert polar_bound(q, 4) == pytest.approx(math.fsum(terms), abs=1e-15)
    # first-round erasure mass is (1 - (1-2q)^N) / 2, never above 1/2
    assert polar_round_stats(q, 4, 1).p_t <= 0.5 + 1e-15


def test_prop1_matches_first_round():
    for s in range(1, 5):
        for q in (0.03, 0.2):
            sc = prop1_f(q, s)
            assert sc.p_bar[s] == pytest.approx(polar_round_stats(q, s, 1).p_t, abs=1e-14)
            assert sc.f == pytest.approx(polar_terms(q, s)[0], abs=1e-14)


@pytest.mark.parametrize("s", [1, 2, 3, 4])
def test_prop1_derivative(s):
    assert abs(prop1_derivative_check(s) - s) < 0.05


def test_entropy_recursion_matches_enumeration():
    q, s = 0.17, 3
    rows = appendix_entropy_recursion(q, s)
    st = polar_round_stats(q, s, 1)
    h_good, h_bad = rows[-1]
    assert h_good == pytest.approx(st.h_good, abs=1e-12)
    assert h_bad == pytest.approx(st.h_bad, abs=1e-12)


def test_ska_variants():
    t = ska_terms_n4(0.1)
    assert 0.0 <= t.pr_u2 <= 1.0
    assert t.term >= 0.0
    lit = interactive_ska_bound_n4(0.1, "literal")
    assert lit < interactive_ska_bound_n4(0.1)
    with pytest.raises(ValueError):
        ska_terms_n4(0.1, "bogus")


def test_ska_at_least_polar2_on_coarse_grid():
    for q in np.linspace(0.01, 0.49, 25):
        assert interactive_ska_bound_n4(q) >= polar_bound(q, 2) - 1e-12


@settings(max_examples=60, deadline=None)
@given(st.floats(0.001, 0.499))
def test_lower_bounds_below_upper(q):
    h = upper_bound(q)
    for m in ("extension", "recursive:5", "polar:2", "polar:4", "ska", "hybrid:3:3"):
        assert MethodId.parse(m).evaluate(q) <= h + 1e-12


@settings(max_examples=40, deadline=None)
@given(st.floats(0.001, 0.499))
def test_symmetry_property(q):
    for m in ("recursive:3", "polar:3", "ska"):
        f = MethodId.parse(m).evaluate
        assert f(q) == pytest.approx(f(1 - q), abs=1e-9)


@pytest.mark.parametrize(
    "text,label,params",
    [
        ("extension", "extension", ""),
        ("recursive", "recursive:5", "T=5"),
        ("recursive:3", "recursive:3", "T=3"),
        ("polar:4", "polar:4", "s=4"),
        ("ska", "ska:erasure-side", "variant=erasure-side"),
        ("ska:literal", "ska:literal", "variant=literal"),
        ("upper", "upper", ""),
    ],
)
def test_method_parse(text, label, params):
    m = MethodId.parse(text)
    assert m.label == label
    assert m.param_text == params


@pytest.mark.parametrize("bad", ["foo", "polar", "polar:5", "polar:x", "recursive:0", "hybrid:2", "ska:nope"])
def test_method_parse_errors(bad):
    with pytest.raises(ValueError):
        MethodId.parse(bad)


def test_grid_points_inclusive():
    pts = Grid(0.0, 1.0, 0.005).points()
    assert len(pts) == 201
    assert pts[0] == 0.0 and pts[-1] == 1.0
    with pytest.raises(ValueError):
        Grid(0.0, 1.0, 0.0)


def test_crossovers_interpolate():
    g = Grid(0.0, 0.5, 0.01)
    a = sweep(MethodId.parse("polar:2"), g)
    b = sweep(MethodId.parse("recursive:5"), g)
    xs = crossovers(a, b)
    assert len(xs) >= 1
    assert 0.1 < xs[0] < 0.25
