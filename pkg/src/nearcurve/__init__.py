"""Counting rational points near planar curves, with the analytic machinery
(Selberg polynomials, exponential sums, stationary phase) used to study them."""

__version__ = "0.1.0"

from .curve import Curve, builtin, from_poly
from .lattice_count import CountQuery, CountResult, count, count_exact, dist_to_int, dyadic_sum

__all__ = [
    "Curve", "builtin", "from_poly",
    "CountQuery", "CountResult", "count", "count_exact", "dist_to_int", "dyadic_sum",
]
