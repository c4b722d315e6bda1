"""Selberg majorant and minorant of the indicator of (-delta, delta) on R/Z.

Construction: the indicator of an arc ``[a, b]`` equals
``b - a + psi(a - x) + psi(x - b)`` with the sawtooth ``psi(x) = {x} - 1/2``.
Vaaler's polynomial ``V_K`` satisfies ``|psi - V_K| <= Delta_{K+1} / (2K+2)``
with ``Delta_N`` the Fejer kernel, so replacing each ``psi`` by
``V_K +- Delta_{K+1} / (2K+2)`` gives trigonometric polynomials of degree K
above and below the indicator, with mean ``b - a +- 1/(K+1)``.

For ``a = -delta, b = delta`` the coefficients are real and even::

    S(k) = H(k/(K+1)) sin(2 pi k delta)/(pi k) +- (1 - |k|/(K+1)) cos(2 pi k delta)/(K+1)

with ``H(u) = pi u (1 - u) cot(pi u) + u``.
"""

from dataclasses import dataclass
import math

import numpy as np

from . import _kernels as kern
from .lattice_count import CountQuery, _a_bounds, count

SIGNS = ("majorant", "minorant")
SANDWICH_TOL = 1e-9


@dataclass(frozen=True, eq=False)
class SelbergPolynomial:
    """Degree-K trigonometric polynomial stored as ``coeffs[k + K] = S(k)``, ``|k| <= K``."""

    sign: str
    K: int
    delta: float
    coeffs: np.ndarray

    def coef(self, k):
        return self.coeffs[k + self.K] if abs(k) <= self.K else 0.0

    @property
    def mean(self):
        return self.coeffs[self.K].real

    @property
    def cos_coeffs(self):
        """Real coefficients ``c[0..K]`` of ``c0 + 2 sum c_k cos(2 pi k x)``."""
        return self.coeffs[self.K:].real.copy()


def _vaaler_weight(u):
    u = np.asarray(u, dtype=float)
    return np.pi * u * (1 - u) / np.tan(np.pi * u) + u


def _sign(sign):
    if sign in ("majorant", "plus", "+", 1):
        return "majorant"
    if sign in ("minorant", "minus", "-", -1):
        return "minorant"
    raise ValueError(f"sign must be majorant or minorant, got {sign!r}")


def build(sign, K, delta):
    """Selberg polynomial of degree ``K`` for the arc ``(-delta, delta)``."""
    sign = _sign(sign)
    if not 0 < delta < 0.5:
        raise ValueError(f"delta must lie in (0, 1/2), got {delta}")
    K = int(K)
    if K < 1:
        raise ValueError("K must be a positive integer")
    s = 1.0 if sign == "majorant" else -1.0
    k = np.arange(1, K + 1)
    u = k / (K + 1)
    ang = 2 * np.pi * k * delta
    pos = _vaaler_weight(u) * np.sin(ang) / (np.pi * k) + s * (1 - u) * np.cos(ang) / (K + 1)
    c = np.empty(2 * K + 1, dtype=complex)
    c[K] = 2 * delta + s / (K + 1)
    c[K + 1:] = pos
    c[:K] = pos[::-1]
    return SelbergPolynomial(sign, K, float(delta), c)


def evaluate(p, alpha):
    """Value of ``sum S(k) e(k alpha)``; scalars use ``math.fsum``, arrays pairwise sums."""
    ks = np.arange(-p.K, p.K + 1)
    if np.ndim(alpha) == 0:
        ang = 2 * np.pi * ks * (float(alpha) % 1.0)
        terms = p.coeffs * np.exp(1j * ang)
        im = math.fsum(terms.imag)
        assert abs(im) <= 1e-12 * max(1.0, math.fsum(np.abs(terms))), im
        return math.fsum(terms.real)
    a = np.asarray(alpha, dtype=float) % 1.0
    c = p.cos_coeffs
    out = np.empty(a.shape)
    flat = a.ravel()
    res = out.ravel()
    step = max(1, 2_000_000 // (p.K + 1))
    for i in range(0, flat.size, step):
        x = flat[i:i + step]
        res[i:i + step] = c[0] + 2 * np.sum(c[1:] * np.cos(2 * np.pi * np.outer(x, ks[p.K + 1:])), axis=1)
    return out


def grid_values(p, n):
    """Values on the grid ``j/n`` via an inverse FFT (needs ``n > 2K``)."""
    if n <= 2 * p.K:
        raise ValueError("grid must have more than 2K points")
    spec = np.zeros(n, dtype=complex)
    ks = np.arange(-p.K, p.K + 1)
    spec[ks % n] = p.coeffs
    vals = np.fft.ifft(spec) * n
    return vals.real


def indicator(alpha, delta):
    a = np.asarray(alpha, dtype=float) % 1.0
    return (np.minimum(a, 1.0 - a) < delta).astype(float)


@dataclass
class VerifyReport:
    sign: str
    K: int
    delta: float
    grid_size: int
    sandwich_ok: bool
    mean_ok: bool
    domination_ok: bool
    weak_domination_ok: bool
    conjugate_ok: bool
    proximity_ok: bool
    mean: float
    negative_mass: bool
    violations: list

    @property
    def ok(self):
        return (self.sandwich_ok and self.mean_ok and self.domination_ok
                and self.conjugate_ok and self.proximity_ok)


def verify(p, grid_size=100_000, other=None):
    """Check the defining properties of ``p`` on a uniform grid.

    Never raises on failure; violated grid points (first 20) are listed in
    the report. When ``other`` (the opposite-sign polynomial) is given, the
    ordering majorant >= minorant is checked as well.
    """
    if grid_size < 1000:
        raise ValueError("grid_size must be at least 1000")
    n = max(grid_size, 2 * p.K + 1)
    x = np.arange(n) / n
    vals = grid_values(p, n)
    chi = indicator(x, p.delta)
    if p.sign == "majorant":
        bad = vals < chi - SANDWICH_TOL
    else:
        bad = vals > chi + SANDWICH_TOL
    if other is not None:
        ov = grid_values(other, n)
        up, lo = (vals, ov) if p.sign == "majorant" else (ov, vals)
        bad |= up < lo - SANDWICH_TOL
    s = 1 if p.sign == "majorant" else -1
    expected = 2 * p.delta + s / (p.K + 1)
    mean = p.mean
    k = np.arange(1, p.K + 1)
    pos = p.coeffs[p.K + 1:]
    neg = p.coeffs[:p.K][::-1]
    target = np.sin(2 * np.pi * k * p.delta) / (np.pi * k)
    return VerifyReport(
        sign=p.sign, K=p.K, delta=p.delta, grid_size=n,
        sandwich_ok=not bad.any(),
        mean_ok=abs(mean - expected) <= 1e-14,
        domination_ok=bool(np.all(np.abs(p.coeffs) <= abs(mean) * (1 + 1e-15))),
        # provable for both signs: |S(k)| <= 2 delta + 1/(K+1)
        weak_domination_ok=bool(np.all(np.abs(p.coeffs) <= (2 * p.delta + 1 / (p.K + 1)) * (1 + 1e-15))),
        conjugate_ok=bool(np.all(np.abs(neg - np.conj(pos)) <= 1e-15)),
        proximity_ok=bool(np.all(np.abs(pos - target) <= 1.0 / (p.K + 1))),
        mean=float(mean),
        negative_mass=mean < 0,
        violations=[(float(x[i]), float(vals[i]), float(chi[i])) for i in np.flatnonzero(bad)[:20]],
    )


def sandwich_counts(curve, Q, delta, K, workers=1):
    """``(sum S^-(q f(a/q)), Ntilde(Q, delta), sum S^+(q f(a/q)))`` over the block Q < q <= 2Q."""
    query = CountQuery(Q, delta, "tilde")
    q0, q1 = query.q_range
    qs = np.arange(q0, q1 + 1, dtype=np.int64)
    a_lo, a_hi = _a_bounds(curve, qs)
    fr = kern.frac_values(curve.kind_code, curve.coeffs, qs, a_lo, a_hi)
    lower = kern.cos_series_sum(build("minorant", K, float(delta)).cos_coeffs, fr)
    upper = kern.cos_series_sum(build("majorant", K, float(delta)).cos_coeffs, fr)
    n = count(curve, query, workers).count
    return lower, n, upper
