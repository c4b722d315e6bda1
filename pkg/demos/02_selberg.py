# Trigonometric polynomials of degree K squeezing the indicator of (-delta, delta) mod 1.

import numpy as np

from nearcurve import builtin
from nearcurve.selberg import build, evaluate, grid_values, indicator, sandwich_counts, verify

K, delta = 20, 0.1
up = build("majorant", K, delta)
lo = build("minorant", K, delta)
print(up.mean, 2 * delta + 1 / (K + 1))  # the mean is pinned down exactly
print(lo.mean, 2 * delta - 1 / (K + 1))

x = np.linspace(-0.5, 0.5, 11)
print(np.round(evaluate(lo, x), 4))
print(indicator(x, delta))
print(np.round(evaluate(up, x), 4))

# the grid check behind verify(): 10^5 points through one inverse FFT
g = grid_values(up, 100_000)
print(g.min(), (g - indicator(np.arange(100_000) / 100_000, delta)).min())

rep = verify(lo, 100_000, other=up)
print(rep.sandwich_ok, rep.mean_ok, rep.proximity_ok)
# strict |S(k)| <= |S(0)| fails for some minorants; the weaker 2*delta + 1/(K+1) bound always holds
print(rep.domination_ok, rep.weak_domination_ok)
print(np.abs(lo.coeffs).max() / lo.mean)

# summed over the points a/q of a dyadic block they bracket the count
lower, n, upper = sandwich_counts(builtin("parabola"), 512, 0.1, 64)
print(lower, n, upper)
