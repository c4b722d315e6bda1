"""Exact counts of rational points a/q lying near a curve.

The floating path screens every pair in a compiled loop and sends pairs whose
distance lies inside a relative band around ``delta`` to an exact decision
(integer arithmetic for polynomial curves, 60-digit mpmath otherwise).
"""

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
import math
import time

import mpmath
import numpy as np

from . import _kernels as kern

BOUNDARY_RTOL = 1e-9
MODES = ("full", "tilde")


class QueryError(ValueError):
    pass


@dataclass(frozen=True)
class CountQuery:
    """Q, delta and the denominator range: ``full`` is 1..Q, ``tilde`` is Q < q <= 2Q.

    ``Q`` and ``delta`` may be floats, ints or Fractions; they are compared
    exactly (a float stands for its exact binary value).
    """

    Q: object
    delta: object
    mode: str = "full"

    def __post_init__(self):
        if self.mode == "dyadic-block":
            object.__setattr__(self, "mode", "tilde")
        if self.mode not in MODES:
            raise QueryError(f"mode must be one of {MODES}, got {self.mode!r}")
        if not 0 < self.delta < Fraction(1, 2):
            raise QueryError(f"delta must lie in (0, 1/2), got {self.delta}")
        if self.mode == "full" and self.Q < 1:
            raise QueryError(f"full mode needs Q >= 1, got {self.Q}")
        if self.Q <= 0:
            raise QueryError(f"Q must be positive, got {self.Q}")

    @property
    def q_range(self):
        """Inclusive integer range ``(q_min, q_max)``; empty when q_min > q_max."""
        Q = Fraction(self.Q)
        if self.mode == "full":
            return 1, math.floor(Q)
        return math.floor(Q) + 1, math.floor(2 * Q)


@dataclass
class CountResult:
    query: CountQuery
    curve_id: str
    count: int
    boundary_hits: int = 0
    elapsed: float = 0.0
    per_q_counts: list = field(default=None, repr=False)


def dist_to_int(x):
    """Distance from ``x`` to the nearest integer, in ``[0, 1/2]``.

    Works for floats, Fractions and mpmath numbers; the result has the
    input's type.
    """
    if isinstance(x, float) and not math.isfinite(x):
        raise ValueError(f"non-finite input {x!r}")
    # x - round(x) is exact for floats, unlike x - floor(x) for tiny negative x
    return abs(x - round(x))


def _a_bounds(curve, qs):
    """Integer a-ranges ``eta*q < a <= xi*q`` for each q, computed exactly."""
    out = []
    for bound in (curve.eta, curve.xi):
        n, d = bound.numerator, bound.denominator
        if qs.size and abs(n) * int(qs[-1]) < 2 ** 62:
            out.append(np.floor_divide(n * qs, d))
        else:
            out.append(np.array([n * int(q) // d for q in qs], dtype=np.int64))
    return out[0] + 1, out[1]


class _ExactPoly:
    """Exact membership ``||q f(a/q)|| < delta`` for a rational polynomial f.

    With ``f = sum c_j x^j`` and ``L`` the common denominator of the c_j,
    ``q f(a/q) = P(a, q) / (L q^(d-1))`` where ``P = sum (L c_j) a^j q^(d-j)``
    is an integer.
    """

    def __init__(self, curve, delta):
        cs = curve.exact_form
        self.deg = len(cs) - 1
        L = 1
        for c in cs:
            L = L * c.denominator // math.gcd(L, c.denominator)
        self.L = L
        self.num = [int(c * L) for c in cs]
        self.delta = Fraction(delta)

    def member(self, a, q):
        P = sum(n * a ** j * q ** (self.deg - j) for j, n in enumerate(self.num))
        M = self.L * q ** (self.deg - 1)
        r = P % M
        d = min(r, M - r)
        return d * self.delta.denominator < self.delta.numerator * M

    def count_q(self, q, a_lo, a_hi):
        """Members among ``a_lo <= a <= a_hi`` for one q (vectorised when int64 is safe)."""
        if a_hi < a_lo:
            return 0
        M = self.L * q ** (self.deg - 1)
        amax = max(abs(a_lo), abs(a_hi))
        bound = sum(abs(n) * amax ** j * q ** (self.deg - j) for j, n in enumerate(self.num))
        if bound >= 2 ** 62 or M >= 2 ** 62:
            return sum(self.member(a, q) for a in range(a_lo, a_hi + 1))
        a = np.arange(a_lo, a_hi + 1, dtype=np.int64)
        P = np.zeros_like(a)
        for j in range(self.deg, -1, -1):
            P = P * a + self.num[j] * q ** (self.deg - j)
        r = np.mod(P, M)
        d = np.minimum(r, M - r)
        # d * den < num * M  <=>  d < ceil(num * M / den)
        lim = -((-self.delta.numerator * M) // self.delta.denominator)
        return int(np.count_nonzero(d < lim))


def _mp_member(curve, a, q, delta):
    with mpmath.workdps(60):
        x = mpmath.mpf(a) / q
        if curve.kind == "exp":
            v = q * mpmath.exp(x)
        elif curve.kind == "sqrt":
            v = mpmath.sqrt(mpmath.mpf(a) * q)
        elif curve.kind == "circle":
            v = mpmath.sqrt(mpmath.mpf(q) ** 2 - mpmath.mpf(a) ** 2)
        else:
            v = q * mpmath.polyval([mpmath.mpf(c.numerator) / c.denominator for c in reversed(curve.exact_form)], x)
        d = Fraction(delta)
        return dist_to_int(v) < mpmath.mpf(d.numerator) / d.denominator


def _split(qs, workers):
    """Contiguous chunks of ``qs`` carrying roughly equal numbers of pairs."""
    if workers <= 1 or qs.size < 2 * workers:
        return [slice(0, qs.size)]
    w = np.cumsum(qs.astype(float))
    cuts = np.searchsorted(w, w[-1] * np.arange(1, workers) / workers)
    edges = [0, *sorted(set(int(c) for c in cuts)), qs.size]
    return [slice(a, b) for a, b in zip(edges[:-1], edges[1:]) if b > a]


def count(curve, query, workers=1, per_q=False):
    """Number of pairs (a, q) with q in the query range, ``eta q < a <= xi q``
    and ``||q f(a/q)|| < delta``.

    Parameters
    ----------
    curve : Curve
    query : CountQuery
    workers : int
        Threads used for the compiled scan; the reduction is an integer sum
        so the result does not depend on this.
    per_q : bool
        Keep the list of ``(q, count_q)`` in the result.
    """
    t0 = time.perf_counter()
    q0, q1 = query.q_range
    qs = np.arange(q0, q1 + 1, dtype=np.int64)
    a_lo, a_hi = _a_bounds(curve, qs)
    counts = np.zeros(qs.size, dtype=np.int64)
    delta_f = float(query.delta)

    def work(sl):
        return kern.count_block(curve.kind_code, curve.coeffs, qs[sl], a_lo[sl], a_hi[sl],
                                delta_f, BOUNDARY_RTOL, counts[sl])

    chunks = _split(qs, workers)
    if len(chunks) == 1:
        cands = [work(chunks[0])]
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            cands = list(pool.map(work, chunks))
    cand = np.concatenate(cands) if cands else np.empty((0, 2), dtype=np.int64)

    if cand.shape[0]:
        exact = _ExactPoly(curve, query.delta) if curve.exact_form is not None else None
        for a, q in cand.tolist():
            inside = exact.member(a, q) if exact else _mp_member(curve, a, q, query.delta)
            if inside:
                counts[q - q0] += 1

    result = CountResult(query, curve.id, int(counts.sum()), int(cand.shape[0]),
                         time.perf_counter() - t0)
    if per_q:
        result.per_q_counts = list(zip(qs.tolist(), counts.tolist()))
    return result


def count_exact(curve, query, per_q=False):
    """Same count as :func:`count`, every membership decided in exact rational arithmetic."""
    if curve.exact_form is None:
        raise QueryError(f"curve {curve.id!r} has no exact rational form")
    t0 = time.perf_counter()
    q0, q1 = query.q_range
    exact = _ExactPoly(curve, query.delta)
    per = []
    for q in range(q0, q1 + 1):
        lo = math.floor(curve.eta * q) + 1
        hi = math.floor(curve.xi * q)
        per.append((q, exact.count_q(q, lo, hi)))
    result = CountResult(query, curve.id, sum(c for _, c in per), 0, time.perf_counter() - t0)
    if per_q:
        result.per_q_counts = per
    return result


def dyadic_sum(curve, Q, delta, workers=1):
    """Blocks ``Ntilde(Q/2^r, delta)`` for r = 1, 2, ... and their total.

    Stops at the first r with ``2^(r-1) > Q``; that block (always empty) is
    included in the returned list.
    """
    Q = Fraction(Q)
    blocks = []
    r = 1
    while True:
        blocks.append(count(curve, CountQuery(Q / 2 ** r, delta, "tilde"), workers).count)
        if 2 ** (r - 1) > Q:
            break
        r += 1
    return sum(blocks), blocks
