"""Exponential sums along the curve and the oscillatory integrals that model them."""

from dataclasses import dataclass
import math
import warnings

import numpy as np

from . import _kernels as kern
from .lattice_count import dist_to_int

GL_NODES, GL_WEIGHTS = np.polynomial.legendre.leggauss(6)
MIN_PANELS = 8


class QuadratureWarning(RuntimeWarning):
    pass


@dataclass(frozen=True)
class IndexBounds:
    k: int
    H_minus: int
    H_plus: int
    h_minus: int
    h_plus: int

    @property
    def H(self):
        return max(abs(self.H_minus), abs(self.H_plus))

    def interior(self):
        """h with ``h_minus < h < h_plus`` (may be empty)."""
        return range(self.h_minus + 1, self.h_plus)

    def full(self):
        return range(self.H_minus, self.H_plus + 1)


@dataclass(frozen=True)
class PhasePoint:
    k: int
    h: int
    beta_h: float
    lambda_h: float


@dataclass
class OscIntegral:
    value: complex
    error: float
    panels: int


def _check_k(k):
    k = int(k)
    if k == 0:
        raise ValueError("k must be non-zero")
    return k


def _a_range(curve, q):
    return math.floor(curve.eta * q) + 1, math.floor(curve.xi * q)


def _frac_phase(curve, q):
    """Fractional parts of ``q f(a/q)`` for ``eta q < a <= xi q``."""
    lo, hi = _a_range(curve, q)
    qs = np.array([q], dtype=np.int64)
    return kern.frac_values(curve.kind_code, curve.coeffs, qs,
                            np.array([lo], dtype=np.int64), np.array([hi], dtype=np.int64))


def exp_sum(curve, k, q):
    """``sum_{eta q < a <= xi q} e(k q f(a/q))``."""
    k = _check_k(k)
    r = _frac_phase(curve, int(q))
    # reduce k*r before scaling so that -k gives the exact conjugate
    t = k * r
    t = t - np.trunc(t)
    ang = 2 * np.pi * t
    return complex(math.fsum(np.cos(ang)), math.fsum(np.sin(ang)))


def index_bounds(curve, k):
    """H_-, H_+, h_- and h_+ for ``k f'`` over ``[eta, xi]`` (f' is monotone)."""
    k = _check_k(k)
    ends = (k * curve.f1(float(curve.eta)), k * curve.f1(float(curve.xi)))
    lo, hi = min(ends), max(ends)
    return IndexBounds(k, math.floor(lo) - 1, math.ceil(hi) + 1,
                       math.ceil(lo) + 1, math.floor(hi) - 1)


def stationary_point(curve, k, h, tol=1e-12):
    """Solve ``k f'(beta) = h`` on ``[eta, xi]`` and return beta_h with lambda_h.

    Newton from the midpoint, falling back to bisection whenever a step leaves
    the current bracket.
    """
    k = _check_k(k)
    lo, hi = float(curve.eta), float(curve.xi)
    g_lo = k * curve.f1(lo) - h
    g_hi = k * curve.f1(hi) - h
    if not g_lo * g_hi < 0:
        raise ValueError(f"h={h} is not strictly between the values of {k} f' on [eta, xi]")
    if g_lo > 0:
        lo, hi = hi, lo
    b = 0.5 * (lo + hi)
    for _ in range(200):
        g = k * curve.f1(b) - h
        if abs(g) <= tol * abs(k):
            break
        if g < 0:
            lo = b
        else:
            hi = b
        d = k * curve.f2(b)
        step = b - g / d if d != 0 else None
        if step is None or not min(lo, hi) < step < max(lo, hi):
            step = 0.5 * (lo + hi)
        if step == b:
            break
        b = step
    lam = dist_to_int(k * curve.f(b) - h * b)
    return PhasePoint(k, int(h), float(b), float(lam))


def _osc(curve, k, h, qa, qb, lo, hi, target=None):
    re, im, err, npan = kern.osc_kernel(curve.kind_code, curve.coeffs, curve.jet, float(k), float(h),
                                        int(qa), int(qb), float(lo), float(hi),
                                        GL_NODES, GL_WEIGHTS, MIN_PANELS)
    if target is not None and err > target:
        warnings.warn(f"oscillatory quadrature error estimate {err:.3g} exceeds target {target:.3g}",
                      QuadratureWarning, stacklevel=3)
    return OscIntegral(complex(re, im), err, npan)


def osc_integral(curve, k, h, q, lo=None, hi=None, full=False):
    """``q * integral_lo^hi e(q (k f(beta) - h beta)) d beta`` over the extended curve.

    Defaults to ``[eta, xi]``. Returns the complex value, or an
    :class:`OscIntegral` with the error estimate and panel count when
    ``full`` is set.
    """
    k = _check_k(k)
    lo = float(curve.eta) if lo is None else float(lo)
    hi = float(curve.xi) if hi is None else float(hi)
    if not lo < hi:
        raise ValueError("need lo < hi")
    res = _osc(curve, k, h, q, q, lo, hi, target=1e-9 * q * (hi - lo))
    return res if full else res.value


def block_integral(curve, k, h, q_lo, q_hi, lo=None, hi=None):
    """``sum_{q_lo <= q <= q_hi} q * integral e(q (k f - h beta))``, summed inside the integrand."""
    k = _check_k(k)
    lo = float(curve.eta) if lo is None else float(lo)
    hi = float(curve.xi) if hi is None else float(hi)
    return _osc(curve, k, h, q_lo, q_hi, lo, hi, target=1e-9 * q_hi * (q_hi - q_lo + 1) * (hi - lo))


@dataclass
class SumIntegralReport:
    k: int
    q: int
    exp_sum: complex
    integral_sum: complex
    difference: float
    H: int
    scaled: float


def sum_integral_compare(curve, k, q):
    """Compare the exponential sum with the sum over ``H_- <= h <= H_+`` of its integrals."""
    k = _check_k(k)
    s = exp_sum(curve, k, q)
    ib = index_bounds(curve, k)
    total = sum((osc_integral(curve, k, h, q) for h in ib.full()), 0j)
    diff = abs(s - total)
    return SumIntegralReport(k, q, s, total, diff, ib.H, diff / math.log(2 + ib.H))


def small_lambda_census(curve, K, Q):
    """Number of (k, h), ``0 < |k| <= K``, ``h_- < h < h_+``, with ``lambda_h <= 1/Q``."""
    n = 0
    for k in range(1, int(K) + 1):
        for kk in (k, -k):
            for h in index_bounds(curve, kk).interior():
                if stationary_point(curve, kk, h).lambda_h <= 1.0 / Q:
                    n += 1
    return n
