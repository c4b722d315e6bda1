# Exponential sums along the curve versus the integrals that model them.

import math

from nearcurve import builtin
from nearcurve.oscillatory import (exp_sum, index_bounds, osc_integral, small_lambda_census,
                                   stationary_point, sum_integral_compare)

p = builtin("parabola")
k, q = 3, 500

s = exp_sum(p, k, q)
print(s, abs(s), math.sqrt(q * k))  # square-root cancellation

b = index_bounds(p, k)  # k f' runs over [6, 12]
print(b)

# each h with a stationary point contributes roughly q / sqrt(qk)
for h in b.interior():
    sp = stationary_point(p, k, h)
    I = osc_integral(p, k, h, q, full=True)
    print(h, round(sp.beta_h, 4), round(sp.lambda_h, 4), abs(I.value) * math.sqrt(q * k) / q, I.error, I.panels)

# Poisson summation: the sum is close to the sum of its integrals
r = sum_integral_compare(p, k, q)
print(r.exp_sum, r.integral_sum, r.difference)

# resonant pairs: the stationary phase value sits within 1/Q of an integer
for Q in (10, 100, 1000):
    print(Q, small_lambda_census(p, 50, Q))

e = builtin("exp")
sp = stationary_point(e, 5, 7)
print(sp.beta_h, math.log(1.4), sp.lambda_h)
