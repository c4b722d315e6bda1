import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from nearcurve import builtin, from_poly
from nearcurve.curve import (Curve, CurveError, builtin_names, estimate_lip, eval_extended,
                             eval_extended_d1, eval_extended_d2, from_spec)

# closed forms (f, f', f'') used as the derivative oracle
CLOSED = {
    "parabola": (lambda x: x * x, lambda x: 2 * x, lambda x: 2.0),
    "cubic": (lambda x: x ** 3, lambda x: 3 * x * x, lambda x: 6 * x),
    "exp": (math.exp, math.exp, math.exp),
    "sqrt": (math.sqrt, lambda x: 0.5 / math.sqrt(x), lambda x: -0.25 * x ** -1.5),
    "circle-arc": (lambda x: math.sqrt(1 - x * x), lambda x: -x / math.sqrt(1 - x * x),
                   lambda x: -(1 - x * x) ** -1.5),
}


def test_parabola_interior_and_jet():
    p = builtin("parabola")
    assert eval_extended(p, 1.5) == 2.25
    # the quadratic jet of a quadratic is the quadratic
    assert eval_extended(p, 3.0) == pytest.approx(9.0, abs=1e-12)
    assert eval_extended_d2(p, 5.0) == 2.0


def test_exp_across_right_seam():
    c = builtin("exp")
    b = 1 + 1e-6
    for d, fn in enumerate((eval_extended, eval_extended_d1, eval_extended_d2)):
        assert fn(c, b) == pytest.approx(math.e, abs=1e-5), d


def test_exp_left_jet_and_interior():
    c = builtin("exp")
    assert eval_extended_d2(c, -1.0) == 1.0
    assert eval_extended_d1(c, 0.5) == pytest.approx(math.exp(0.5), rel=1e-14)


def test_left_jet_is_taken_at_eta():
    c = builtin("exp")
    b = -0.5
    assert eval_extended(c, b) == pytest.approx(1 + b + b * b / 2, rel=1e-14)
    assert eval_extended_d1(c, b) == pytest.approx(1 + b, rel=1e-14)


def test_vectorised_evaluation():
    p = builtin("parabola")
    x = np.array([0.0, 1.5, 3.0])
    assert np.allclose(eval_extended(p, x), [0.0, 2.25, 9.0])


@pytest.mark.parametrize("name", sorted(CLOSED))
def test_analytic_derivatives_match_finite_differences(name):
    c = builtin(name)
    e, x = float(c.eta), float(c.xi)
    h = 1e-5
    for t in np.linspace(e + 0.05 * (x - e), x - 0.05 * (x - e), 9):
        fd1 = (c.f(t + h) - c.f(t - h)) / (2 * h)
        fd2 = (c.f1(t + h) - c.f1(t - h)) / (2 * h)
        assert c.f1(t) == pytest.approx(float(fd1), rel=1e-6)
        assert c.f2(t) == pytest.approx(float(fd2), rel=1e-6)


@pytest.mark.parametrize("name", sorted(CLOSED))
def test_builtins_match_closed_forms(name):
    c = builtin(name)
    f, f1, f2 = CLOSED[name]
    for t in np.linspace(float(c.eta), float(c.xi), 7):
        assert c.f(t) == pytest.approx(f(t), rel=1e-13, abs=1e-14)
        assert c.f1(t) == pytest.approx(f1(t), rel=1e-13, abs=1e-14)
        assert c.f2(t) == pytest.approx(f2(t), rel=1e-13)


@pytest.mark.parametrize("name", sorted(CLOSED))
def test_seam_continuity(name):
    c = builtin(name)
    h = 1e-7
    for p, inward in ((float(c.eta), 1), (float(c.xi), -1)):
        taylor_out = c.f(p) + c.f1(p) * (-inward * h)
        scale = max(1.0, abs(c.f(p)))
        assert abs(eval_extended(c, p - inward * h) - taylor_out) <= 1e-10 * scale
        taylor_in = c.f(p) + c.f1(p) * (inward * h)
        assert abs(eval_extended(c, p + inward * h) - taylor_in) <= 1e-10 * scale


@pytest.mark.parametrize("name", sorted(CLOSED))
def test_second_derivative_frozen_outside(name):
    c = builtin(name)
    e, x = float(c.eta), float(c.xi)
    for b in (e - 0.3, e - 5.0):
        assert eval_extended_d2(c, b) == c.f2(e)
    for b in (x + 0.3, x + 5.0):
        assert eval_extended_d2(c, b) == c.f2(x)


def test_estimate_lip_examples():
    assert estimate_lip(builtin("parabola"), 0.5, 1000) == 0.0
    assert 2.6 <= estimate_lip(builtin("exp"), 1.0, 1000) <= math.e
    assert estimate_lip(builtin("cubic"), 1.0, 1000) == pytest.approx(6.0, abs=0.01)


@settings(max_examples=25, deadline=None)
@given(st.integers(2, 300), st.integers(0, 300), st.sampled_from(["exp", "sqrt", "cubic"]))
def test_estimate_lip_non_decreasing_in_samples(n, extra, name):
    c = builtin(name)
    assert estimate_lip(c, 0.75, n) <= estimate_lip(c, 0.75, n + extra)


def test_builtin_registry():
    p = builtin("parabola")
    assert (p.eta, p.xi, p.f2_lower) == (1, 2, 2.0)
    assert p.exact_form == (0, 0, 1)
    e = builtin("exp")
    assert (e.eta, e.xi, e.f2_lower, e.exact_form) == (0, 1, 1.0, None)
    assert set(builtin_names()) == set(CLOSED)
    with pytest.raises(CurveError):
        builtin("nosuch")


def test_lip_estimate_recorded():
    assert math.isfinite(builtin("exp").lip_estimate)


def test_validation_rejects_bad_curves():
    with pytest.raises(CurveError):
        from_poly([0, 0, 0, 1], -1, 1)  # f'' changes sign
    with pytest.raises(CurveError):
        from_poly([0, 0, 1], 1, 2, f2_lower=2.5)
    with pytest.raises(CurveError):
        from_poly([0, 0, 1], 2, 1)
    with pytest.raises(CurveError):
        from_poly([0, 1], 0, 1)  # a line
    with pytest.raises(CurveError):
        Curve("x", 1, 2, "poly", 1.5, 2.0, (0, 0, 1))
    with pytest.raises(CurveError):
        Curve("x", 0, 1, "spline", 0.5, 1.0)


def test_from_poly_rational_coefficients():
    c = from_poly(["1/3", "0", "1/2"], "1/2", 3)
    assert c.exact_form == (Fraction(1, 3), 0, Fraction(1, 2))
    assert c.eta == Fraction(1, 2)
    assert c.f(2.0) == pytest.approx(1 / 3 + 2)


def test_from_spec_forms():
    assert from_spec({"name": "cubic"}).id == "cubic"
    c = from_spec({"poly": ["0", "0", "1"], "eta": 1, "xi": 2, "theta": 0.5})
    assert c.theta == 0.5 and c.degree == 2
    with pytest.raises(CurveError):
        from_spec({"poly": ["0", "0", "1"]})


def test_shifted_keeps_curvature():
    s = builtin("cubic").shifted(3, -2)
    assert s.exact_form == (-2, 3, 0, 1)
    assert s.f2(1.5) == builtin("cubic").f2(1.5)
