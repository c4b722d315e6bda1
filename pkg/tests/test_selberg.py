import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from nearcurve import builtin
from nearcurve.selberg import (SelbergPolynomial, build, evaluate, grid_values, indicator,
                               sandwich_counts, verify)


def test_zero_coefficient_identities():
    assert build("majorant", 9, 0.1).mean == pytest.approx(0.3, abs=1e-15)
    assert build("minorant", 9, 0.1).mean == pytest.approx(0.1, abs=1e-15)


def test_coefficient_close_to_indicator_transform():
    p = build("majorant", 100, 0.25)
    want = math.sin(2 * math.pi * 0.25) / math.pi
    for k in (1, -1):
        assert abs(p.coef(k) - want) <= 1 / 101


def test_degree_and_conjugate_symmetry():
    p = build("minus", 30, 0.17)
    assert p.coeffs.shape == (61,)
    assert p.coef(31) == 0 and p.coef(-40) == 0
    for k in range(1, 31):
        assert p.coef(-k) == np.conj(p.coef(k))
        assert p.coef(k).imag == 0


def test_pointwise_examples():
    for K in (5, 50, 500):
        for d in (0.01, 0.2, 0.45):
            assert evaluate(build("+", K, d), 0.0) >= 1 - 1e-12
            assert evaluate(build("-", K, d), 0.5) <= 1e-12


@settings(max_examples=30, deadline=None)
@given(st.integers(1, 300), st.floats(0.005, 0.49), st.floats(-3, 3), st.sampled_from(["+", "-"]))
def test_periodic_and_sandwiched(K, d, x, sign):
    p = build(sign, K, d)
    v = evaluate(p, x)
    assert v == pytest.approx(evaluate(p, x + 1), abs=1e-12)
    chi = float(indicator(np.array([x]), d)[0])
    if sign == "+":
        assert v >= chi - 1e-9
    else:
        assert v <= chi + 1e-9


def test_scalar_evaluation_matches_direct_sum():
    p = build("majorant", 1000, 0.03)
    x = 0.123456
    k = np.arange(-p.K, p.K + 1)
    direct = np.sum(p.coeffs * np.exp(2j * np.pi * k * x)).real
    assert evaluate(p, x) == pytest.approx(direct, abs=1e-12)
    xs = np.linspace(0, 1, 257)
    assert np.allclose(evaluate(p, xs), [evaluate(p, t) for t in xs], atol=1e-12)


def test_grid_values_match_evaluate():
    p = build("minorant", 40, 0.2)
    n = 1024
    assert np.allclose(grid_values(p, n), evaluate(p, np.arange(n) / n), atol=1e-12)


def test_verify_majorant_passes():
    r = verify(build("majorant", 50, 0.1), 100_000)
    assert r.ok and r.sandwich_ok and r.mean_ok and r.domination_ok and r.proximity_ok


def test_verify_small_delta_minorant():
    r = verify(build("minorant", 10, 0.01), 100_000)
    assert r.ok
    assert r.negative_mass
    assert r.mean == pytest.approx(0.02 - 1 / 11, abs=1e-15)


def test_verify_flags_tampering():
    p = build("majorant", 20, 0.1)
    bad = p.coeffs.copy()
    bad[p.K] -= 0.2
    r = verify(SelbergPolynomial(p.sign, p.K, p.delta, bad), 10_000)
    assert not r.sandwich_ok and r.violations and not r.ok


@pytest.mark.parametrize("d", [0.01, 0.1, 0.3])
@pytest.mark.parametrize("K", [10, 100, 1000])
def test_property_matrix(d, K):
    plus, minus = build("majorant", K, d), build("minorant", K, d)
    for p, other in ((plus, minus), (minus, plus)):
        r = verify(p, 100_000, other)
        assert r.sandwich_ok and r.mean_ok and r.conjugate_ok and r.proximity_ok
        # |S(k)| <= 2 delta + 1/(K+1) holds for both signs
        assert r.weak_domination_ok
    assert verify(plus).domination_ok


def test_minorant_strict_domination_can_fail():
    # |S^-(k)| <= |S^-(0)| does not hold for every (delta, K); see the acceptance suite
    r = verify(build("minorant", 10, 0.1))
    assert not r.domination_ok and r.weak_domination_ok


def test_sandwich_counts_brackets_block_count():
    p = builtin("parabola")
    lo, n, hi = sandwich_counts(p, 512, 0.1, 64)
    assert lo - 1e-6 <= n <= hi + 1e-6


def test_sandwich_narrows_with_K():
    p = builtin("parabola")
    widths = []
    for K in (16, 64, 256):
        lo, n, hi = sandwich_counts(p, 64, 0.3, K)
        assert lo - 1e-6 <= n <= hi + 1e-6
        widths.append(hi - lo)
    assert widths[0] > widths[-1]


def test_sandwich_with_empty_count():
    p = builtin("exp")
    lo, n, hi = sandwich_counts(p, 40, 1e-7, 16)
    assert n == 0 and lo <= 1e-6 and hi >= -1e-6


def test_build_rejects_bad_input():
    with pytest.raises(ValueError):
        build("majorant", 0, 0.1)
    with pytest.raises(ValueError):
        build("majorant", 10, 0.6)
    with pytest.raises(ValueError):
        build("sideways", 10, 0.1)
