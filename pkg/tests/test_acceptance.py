"""Acceptance criteria 1-10, one pass/fail line each.

Run with pytest (the lines appear in the terminal summary) or directly:
``python tests/test_acceptance.py``.
"""

import pytest

from nearcurve import acceptance

CRITERIA = [
    (1, "dyadic", "dyadic identity, parabola Q=4096, delta in {0.05, 0.2}: exact integer equality"),
    (2, "full_ratio", "N/((xi-eta) delta Q^2) within 10% of 1 at Q=2^15, |ratio-1| decreasing (<=1 inversion)"),
    (3, "block_ratio", "Ntilde/((xi-eta) delta Q^2) within 10% of 3 at Q=2^15"),
    (4, "selberg", "sandwich 1e-9, S(0) to 1e-14, |S(k)| <= |S(0)|, proximity 1/(K+1) on {0.01,0.1,0.3}x{10,100,1000}"),
    (5, "sandwich", "sum S^- <= Ntilde <= sum S^+ (slack 1e-6), Q=512, delta=0.1"),
    (6, "oracle", "float count == exact count on 20 random queries (parabola, cubic)"),
    (7, "scaling", "|I| sqrt(q|k|)/q: max/median <= 3, max changes < 2x under q -> 4q"),
    (8, "exponent", "slope of log|E| vs log Q <= 1.85, delta=0.1, Q=2^10..2^15"),
    (9, "chain", "step ratios finite; battery max grows <= 2x from (128,8) to (256,16)"),
    (10, "regime", "choose_K == 50-digit oracle on 50 points; theta<=1/2, Q>=10^3 gives regime two"),
]

REPORT = []


def _line(num, res, desc):
    failed = [f"{label} {detail}".strip() for label, ok, detail in res.checks if not ok]
    tail = f" | failing: {'; '.join(failed[:3])}" if failed else ""
    return f"criterion {num:2d} [{res.name}] {'PASS' if res.passed else 'FAIL'}: {desc}{tail}"


@pytest.mark.slow
@pytest.mark.parametrize("num, suite, desc", CRITERIA, ids=[c[1] for c in CRITERIA])
def test_criterion(num, suite, desc):
    (res,) = acceptance.run(suite)
    line = _line(num, res, desc)
    REPORT.append(line)
    print(line)
    for l in res.lines()[1:]:
        print(l)
    assert res.passed, line


if __name__ == "__main__":
    for num, suite, desc in CRITERIA:
        print(_line(num, acceptance.run(suite)[0], desc), flush=True)
