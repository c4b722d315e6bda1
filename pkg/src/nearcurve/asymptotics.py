"""Main terms, error bounds, the choice of K and the N0..N5 diagnostic chain.

All logarithms are natural. The implied constants of the bounds are 1;
comparisons against measured quantities are done through fitted ratios.
"""

from dataclasses import dataclass, field
import math

import mpmath
import numpy as np

from . import _kernels as kern
from .lattice_count import CountQuery, _a_bounds, count
from .oscillatory import block_integral, index_bounds, stationary_point

DEFAULT_EPSILON = 0.05


@dataclass(frozen=True)
class RegimeParams:
    theta: float
    Q: float
    delta: float
    epsilon: float = DEFAULT_EPSILON
    regime_c: float = 1.0

    def __post_init__(self):
        if not 0 < self.theta <= 1:
            raise ValueError(f"theta must lie in (0, 1], got {self.theta}")
        if self.epsilon <= 0:
            raise ValueError("epsilon must be positive")


def main_term(eta, xi, Q, delta, mode="full"):
    """``(xi - eta) delta Q^2`` for the full count, three times that for the dyadic block."""
    base = float(xi - eta) * float(delta) * float(Q) ** 2
    if mode in ("tilde", "dyadic-block"):
        return 3 * base
    if mode != "full":
        raise ValueError(f"unknown mode {mode!r}")
    return base


def error_term(curve, Q, delta, mode="full", workers=1):
    """Exact count minus :func:`main_term` (signed)."""
    n = count(curve, CountQuery(Q, delta, mode), workers).count
    return n - main_term(curve.eta, curve.xi, Q, delta, mode)


def threshold(Q, theta):
    """Regime boundary ``Q^((1-2t)/(2-t)) (log Q)^(-(5-t)/(2-t))``."""
    L = math.log(Q)
    return Q ** ((1 - 2 * theta) / (2 - theta)) * L ** (-(5 - theta) / (2 - theta))


def regime(params):
    """1 when ``delta >= regime_c * threshold``, else 2."""
    if params.Q <= 1:
        raise ValueError("regime needs Q > 1")
    return 1 if params.delta >= params.regime_c * threshold(params.Q, params.theta) else 2


def candidate_K(params):
    """Unfloored K of the three balancing cases, keyed 1, 2, 3."""
    Q, d, t = params.Q, params.delta, params.theta
    L = math.log(Q)
    return {
        1: d ** (-2 / 3) * Q ** (1 / 3) * L ** (-2 / 3),
        2: d ** (-2 / (5 - t)) * Q ** ((1 + t) / (5 - t)),
        3: Q ** (t / (2 - t)) * L ** (t / (2 - t)),
    }


def polished_terms(K, Q, delta, theta):
    """The three terms ``Q^2/K``, ``delta K^(1/2) Q^(3/2) log Q`` and ``delta (KQ)^((3-theta)/2)``."""
    return (Q ** 2 / K,
            delta * K ** 0.5 * Q ** 1.5 * math.log(Q),
            delta * (K * Q) ** ((3 - theta) / 2))


@dataclass(frozen=True)
class KChoice:
    K: int
    regime: int
    raw: float
    delta_K_gt_1: bool
    K_le_Q_bound: bool

    @property
    def valid(self):
        return self.delta_K_gt_1 and self.K_le_Q_bound


def _floor_guarded(x, exact):
    f = math.floor(x)
    if abs(x - round(x)) < 1e-9 * max(1.0, abs(x)):
        with mpmath.workdps(50):
            f = int(mpmath.floor(exact()))
    return f


def choose_K(params):
    """Floor of the regime's balancing K, with the working assumptions flagged.

    Raises ``ValueError`` when the floored K is below 1 (parameters far
    outside the admissible range).
    """
    reg = regime(params)
    raw = candidate_K(params)[reg]
    Q, d, t = params.Q, params.delta, params.theta

    def exact():
        mQ, md = mpmath.mpf(Q), mpmath.mpf(d)
        if reg == 1:
            return md ** (-mpmath.mpf(2) / 3) * mQ ** (mpmath.mpf(1) / 3) * mpmath.log(mQ) ** (-mpmath.mpf(2) / 3)
        mt = mpmath.mpf(t)
        return md ** (-2 / (5 - mt)) * mQ ** ((1 + mt) / (5 - mt))

    K = _floor_guarded(raw, exact)
    if K < 1:
        raise ValueError(f"K = {raw:.4g} floors below 1; parameters outside the admissible range")
    return KChoice(K, reg, raw, d * K > 1, K <= Q ** (1 - 2 * params.epsilon / 3))


def error_bound(params, regime_=None):
    """The piecewise error bound (constant 1) for the given or computed regime."""
    if params.Q <= 1:
        raise ValueError("error_bound needs Q > 1")
    reg = regime(params) if regime_ is None else regime_
    Q, d, t = params.Q, params.delta, params.theta
    if reg == 1:
        return d ** (2 / 3) * Q ** (5 / 3) * math.log(Q) ** (2 / 3)
    return d ** (2 / (5 - t)) * Q ** (3 * (3 - t) / (5 - t))


def admissible_delta(params):
    """``Q^(-(1+theta)/(3-theta)+epsilon) <= delta < 1/2``."""
    t = params.theta
    return params.Q ** (-(1 + t) / (3 - t) + params.epsilon) <= params.delta < 0.5


def n1_bound(K, Q, delta, theta, epsilon=DEFAULT_EPSILON, log=math.log):
    """``(dK+1) Q (Q^(1/2) log K / K^(1/2) + log K + K^(1/2)/Q^(1/2-eps) + (KQ)^((1-theta)/2))``."""
    L = log(K)
    return (delta * K + 1) * Q * (Q ** 0.5 * L / K ** 0.5 + L + K ** 0.5 / Q ** (0.5 - epsilon)
                                  + (K * Q) ** ((1 - theta) / 2))


@dataclass
class StepError:
    name: str
    diff: float
    bound: float
    bound_logQ: float

    @property
    def ratio(self):
        if self.bound > 0:
            return self.diff / self.bound
        return math.inf if self.diff else math.nan


@dataclass
class BoundChain:
    K: int
    Q: float
    delta: float
    N0_plus: float
    N0_minus: float
    N1: float
    N2: float
    N3: float
    N4: float
    N5: float
    count: int
    main: float
    pairs: int
    census: int
    step_errors: list = field(default_factory=list)

    def ratios(self):
        return {s.name: s.ratio for s in self.step_errors}


class _ChainIntegrals:
    """Per-(k, h) block integrals over [eta, xi] and over the windows around beta_h.

    They do not depend on delta, so one instance serves several deltas.
    """

    def __init__(self, curve, Q, K):
        self.curve, self.Q, self.K = curve, Q, K
        q0, q1 = CountQuery(Q, 0.25, "tilde").q_range
        self.q0, self.q1 = q0, q1
        mu = curve.length / 2
        lam_cut = 1.0 / float(Q)
        self.rows = []
        for k in range(1, K + 1):
            ib = index_bounds(curve, k)
            full = {h: block_integral(curve, k, h, q0, q1).value for h in ib.full()}
            inner, window = {}, {}
            for h in ib.interior():
                pp = stationary_point(curve, k, h)
                if pp.lambda_h > lam_cut:
                    window[h] = block_integral(curve, k, h, q0, q1, pp.beta_h - mu, pp.beta_h + mu).value
                inner[h] = pp
            self.rows.append((k, ib, full, inner, window))
        self.census = 2 * sum(sum(pp.lambda_h <= lam_cut for pp in r[3].values()) for r in self.rows)


def bound_chain(curve, Q, delta, K, epsilon=DEFAULT_EPSILON, theta=None, integrals=None):
    """Numerical values of N0+-, N1..N5 and the step differences against their bound forms.

    ``integrals`` may carry a precomputed :class:`_ChainIntegrals` for the same
    (curve, Q, K). Terms with k < 0 are conjugates of those with -k, so only
    k > 0 is computed and the sums are doubled.
    """
    K = int(K)
    if K < 1:
        raise ValueError("K must be >= 1")
    theta = curve.theta if theta is None else theta
    ci = integrals or _ChainIntegrals(curve, Q, K)
    Qf, d = float(Q), float(delta)
    w = d + 1.0 / K

    qs = np.arange(ci.q0, ci.q1 + 1, dtype=np.int64)
    a_lo, a_hi = _a_bounds(curve, qs)
    fr = kern.frac_values(curve.kind_code, curve.coeffs, qs, a_lo, a_hi)
    pairs = fr.size
    n1 = n2 = n3 = n4 = n5 = 0.0
    for k, ib, full, inner, window in ci.rows:
        t = k * fr
        t -= np.trunc(t)
        n1 += abs(np.sum(np.exp(2j * np.pi * t)))
        n2 += abs(sum(full.values(), 0j))
        n3 += abs(sum((full[h] for h in inner), 0j))
        n4 += abs(sum((full[h] for h in window), 0j))
        n5 += abs(sum(window.values(), 0j))
    n1, n2, n3, n4, n5 = (2 * w * v for v in (n1, n2, n3, n4, n5))

    n = count(curve, CountQuery(Q, delta, "tilde")).count
    main = main_term(curve.eta, curve.xi, Q, delta, "tilde")
    N0p = pairs * (2 * d + 1 / (K + 1))
    N0m = pairs * (2 * d - 1 / (K + 1))

    def forms(log):
        L = log(K)
        return {
            "N0+": d * Qf + Qf ** 2 / K,
            "N0-": d * Qf + Qf ** 2 / K,
            "N1-N2": w * K * Qf * L,
            "N2-N3": d * K ** 0.5 * Qf ** 1.5 + K ** -0.5 * Qf ** 1.5,
            "N3-N4": w * Qf ** 1.5 * (K ** 1.5 * Qf ** (epsilon - 1) + K ** 0.5 * L),
            "N4-N5": w * Qf * K * L,
            "N5": w * (Qf ** (0.5 + epsilon) * K ** 1.5 + Qf ** 1.5 * K ** 0.5 * L
                       + (Qf * K) ** ((3 - theta) / 2)),
            "N1": n1_bound(K, Qf, d, theta, epsilon, log),
        }

    diffs = {
        "N0+": abs(N0p - main), "N0-": abs(N0m - main),
        "N1-N2": abs(n1 - n2), "N2-N3": abs(n2 - n3), "N3-N4": abs(n3 - n4),
        "N4-N5": abs(n4 - n5), "N5": n5, "N1": n1,
    }
    fk, fq = forms(math.log), forms(lambda _: math.log(Qf))
    steps = [StepError(name, diffs[name], fk[name], fq[name]) for name in diffs]
    return BoundChain(K, Qf, d, N0p, N0m, n1, n2, n3, n4, n5, n, main, pairs, ci.census, steps)


@dataclass
class FitResult:
    slope: float
    intercept: float
    residuals: np.ndarray
    used: int
    dropped: list
    schedule: str = ""


class FitError(ValueError):
    pass


def exponent_fit(records, schedule=""):
    """Least-squares slope of ``log|E|`` against ``log Q``.

    ``records`` are objects with ``Q`` and ``error`` attributes or
    ``(Q, E)`` pairs. Records with ``E == 0`` are dropped and listed.
    """
    pts, dropped = [], []
    for r in records:
        Q, E = (r.Q, r.error) if hasattr(r, "error") else r
        if E == 0:
            dropped.append(Q)
        else:
            pts.append((float(Q), abs(float(E))))
    if len(pts) < 4:
        raise FitError(f"need at least 4 records with non-zero error, got {len(pts)}")
    x = np.log([p[0] for p in pts])
    y = np.log([p[1] for p in pts])
    slope, intercept = np.polyfit(x, y, 1)
    return FitResult(float(slope), float(intercept), y - (slope * x + intercept), len(pts), dropped, schedule)
