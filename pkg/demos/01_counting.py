# Counting rational points a/q near a curve.
# A pair (a, q) counts when eta*q < a <= xi*q and q*f(a/q) lies within delta of an integer.

from fractions import Fraction

from nearcurve import CountQuery, builtin, count, count_exact, dyadic_sum

p = builtin("parabola")  # y = x^2 on [1, 2]

# tiny case, checkable by hand: (2, 1) and (4, 2) are the only hits
print(count(p, CountQuery(2, 0.3)).count)

# the fast path decides most pairs in floating point and re-checks the
# ones sitting close to the delta boundary with exact integers
r = count(p, CountQuery(2000, 0.25), per_q=True)
print(r.count, "pairs,", r.boundary_hits, "decided exactly")
print(count_exact(p, CountQuery(2000, Fraction(1, 4))).count)  # same number, all-rational path

# dyadic blocks Q < q <= 2Q add up to the full count
total, blocks = dyadic_sum(p, 4096, 0.05)
print(total, blocks)

# the full count grows like (xi - eta) * delta * Q^2
for Q in (256, 1024, 4096):
    n = count(p, CountQuery(Q, 0.1)).count
    print(Q, n, n / (0.1 * Q**2))

# other curves: exp on [0, 1] has no rational form, so boundary pairs use 60-digit arithmetic
e = builtin("exp")
print(count(e, CountQuery(3000, 0.1)).count)
