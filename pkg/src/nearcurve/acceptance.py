"""Acceptance suites: exact identities, property checks and trend checks.

Each suite returns a :class:`SuiteResult`; ``run(name)`` dispatches by name
and ``run("all")`` runs every suite in order.
"""

from dataclasses import dataclass, field
import math
import statistics

import mpmath
import numpy as np

from .asymptotics import (RegimeParams, _ChainIntegrals, bound_chain, choose_K, exponent_fit, regime)
from .curve import builtin
from .harness import SweepConfig, run_sweep
from .lattice_count import CountQuery, count, count_exact, dyadic_sum
from .oscillatory import osc_integral
from .selberg import SIGNS, build, sandwich_counts, verify

SEED = 20240611


@dataclass
class SuiteResult:
    name: str
    passed: bool
    checks: list = field(default_factory=list)

    def add(self, label, ok, detail=""):
        self.checks.append((label, bool(ok), detail))

    def finish(self):
        self.passed = all(ok for _, ok, _ in self.checks)
        return self

    def lines(self):
        out = [f"[{'PASS' if self.passed else 'FAIL'}] {self.name}"]
        out += [f"    {'ok ' if ok else 'BAD'} {label} {detail}".rstrip() for label, ok, detail in self.checks]
        return out

    def as_dict(self):
        return {"suite": self.name, "passed": self.passed,
                "checks": [{"label": l, "ok": ok, "detail": d} for l, ok, d in self.checks]}


def _new(name):
    return SuiteResult(name, False)


def dyadic(workers=1):
    """Exact identity N(Q, delta) = sum_r Ntilde(Q/2^r, delta) for the parabola, Q = 4096."""
    res = _new("dyadic")
    p = builtin("parabola")
    for d in (0.05, 0.2):
        total, blocks = dyadic_sum(p, 4096, d, workers)
        n = count(p, CountQuery(4096, d, "full"), workers).count
        res.add(f"delta={d}", total == n, f"dyadic={total} full={n} blocks={len(blocks)}")
    return res.finish()


def _schedule_records(mode, workers):
    cfg = SweepConfig("parabola", 2 ** 8, 2, 8, "power", 1.0, 0.4, mode, workers=workers)
    return run_sweep(cfg)


def full_ratio(workers=1):
    """N / ((xi - eta) delta Q^2) -> 1 along delta = Q^(-2/5), Q = 2^8 .. 2^15."""
    res = _new("full_ratio")
    recs = _schedule_records("full", workers)
    ratios = [r.count / (r.delta * r.Q ** 2) for r in recs]
    res.add("ratio within 10% of 1 at Q=2^15", abs(ratios[-1] - 1) <= 0.10, f"ratio={ratios[-1]:.5f}")
    dev = [abs(x - 1) for x in ratios[-5:]]
    inversions = sum(b > a for a, b in zip(dev, dev[1:]))
    res.add("|ratio-1| decreasing over last four doublings (<=1 inversion)", inversions <= 1,
            "devs=" + ",".join(f"{x:.4f}" for x in dev))
    return res.finish()


def block_ratio(workers=1):
    """Ntilde / ((xi - eta) delta Q^2) -> 3 along the same schedule."""
    res = _new("block_ratio")
    recs = _schedule_records("tilde", workers)
    r = recs[-1]
    ratio = r.count / (r.delta * r.Q ** 2)
    res.add("ratio within 10% of 3 at Q=2^15", abs(ratio / 3 - 1) <= 0.10, f"ratio={ratio:.5f}")
    return res.finish()


def selberg_suite(workers=1):
    """Sandwich, mean, domination and coefficient proximity over the (delta, K) matrix."""
    res = _new("selberg")
    for d in (0.01, 0.1, 0.3):
        for K in (10, 100, 1000):
            polys = {s: build(s, K, d) for s in SIGNS}
            for s in SIGNS:
                other = polys["minorant" if s == "majorant" else "majorant"]
                rep = verify(polys[s], 100_000, other)
                tag = f"{s[:3]} delta={d} K={K}"
                res.add(f"{tag} sandwich (tol 1e-9)", rep.sandwich_ok, f"violations={len(rep.violations)}")
                res.add(f"{tag} mean = 2delta{'+' if s == 'majorant' else '-'}1/(K+1) (1e-14)", rep.mean_ok,
                        f"mean={rep.mean:.17g}")
                worst = float(np.max(np.abs(polys[s].coeffs)) / abs(rep.mean))
                res.add(f"{tag} |S(k)| <= |S(0)|", rep.domination_ok, f"max|S(k)|/|S(0)|={worst:.6f}")
                res.add(f"{tag} |S(k) - sin(2pi k delta)/(pi k)| <= 1/(K+1)", rep.proximity_ok)
    return res.finish()


def sandwich(workers=1):
    """sum S^- <= Ntilde <= sum S^+ for the parabola at Q = 512, delta = 0.1."""
    res = _new("sandwich")
    p = builtin("parabola")
    K = min(choose_K(RegimeParams(p.theta, 512, 0.1)).K, 256)
    lo, n, hi = sandwich_counts(p, 512, 0.1, K, workers)
    res.add(f"K={K}: lower <= Ntilde <= upper (slack 1e-6)", lo - 1e-6 <= n <= hi + 1e-6,
            f"lower={lo:.6f} count={n} upper={hi:.6f}")
    return res.finish()


def oracle(workers=1):
    """Floating count equals the exact rational count on 20 random queries."""
    res = _new("oracle")
    rng = np.random.default_rng(SEED)
    curves = [builtin("parabola"), builtin("cubic")]
    for i in range(20):
        c = curves[i % 2]
        Q = int(rng.integers(1, 2049))
        d = float(rng.uniform(0.01, 0.45))
        q = CountQuery(Q, d, "full")
        fl = count(c, q, workers, per_q=True)
        ex = count_exact(c, q, per_q=True)
        res.add(f"{c.id} Q={Q} delta={d:.6f}", fl.count == ex.count and fl.per_q_counts == ex.per_q_counts,
                f"float={fl.count} exact={ex.count} boundary_hits={fl.boundary_hits}")
    return res.finish()


SCALING_KS = (1, 8, 15, 22, 29, 36, 43, 50)
SCALING_QS = (1000, 1500, 2000)


def _scaling_stats(curve, scale):
    mid = float(curve.eta + curve.xi) / 2
    out = []
    for k in SCALING_KS:
        h = round(k * curve.f1(mid))
        for q in SCALING_QS:
            qq = q * scale
            out.append(abs(osc_integral(curve, k, h, qq)) * math.sqrt(qq * k) / qq)
    return out


def scaling(workers=1):
    """|osc_integral| sqrt(q|k|)/q is stable across the battery and under q -> 4q."""
    res = _new("scaling")
    p = builtin("parabola")
    base = _scaling_stats(p, 1)
    big = _scaling_stats(p, 4)
    spread = max(base) / statistics.median(base)
    res.add("max/median <= 3", spread <= 3, f"max={max(base):.5f} median={statistics.median(base):.5f}")
    change = max(big) / max(base)
    res.add("max changes by < 2x when q -> 4q", 0.5 < change < 2, f"ratio={change:.5f}")
    return res.finish()


def exponent(workers=1):
    """Fitted slope of log|E| against log Q for delta = 0.1, Q = 2^10 .. 2^15."""
    res = _new("exponent")
    cfg = SweepConfig("parabola", 2 ** 10, 2, 6, "fixed", 0.1, 0.0, "tilde", workers=workers)
    fit = exponent_fit(run_sweep(cfg), cfg.describe_schedule())
    res.add("slope <= 1.85 and < 2", fit.slope <= 1.85 and fit.slope < 2, f"slope={fit.slope:.4f}")
    return res.finish()


def chain(workers=1):
    """Bound-chain step ratios are finite and their maxima at most double when Q doubles."""
    res = _new("chain")
    p = builtin("parabola")
    maxima = {}
    for Q, K in ((128, 8), (256, 16)):
        ints = _ChainIntegrals(p, Q, K)
        for d in (0.1, 0.2):
            bc = bound_chain(p, Q, d, K, integrals=ints)
            for name, r in bc.ratios().items():
                res.add(f"Q={Q} K={K} delta={d} {name} ratio finite", math.isfinite(r), f"{r:.5f}")
                maxima.setdefault(name, {})
                maxima[name][Q] = max(maxima[name].get(Q, 0.0), r)
    for name, m in maxima.items():
        res.add(f"{name}: max(Q=256) <= 2 max(Q=128)", m[256] <= 2 * m[128],
                f"{m[128]:.5f} -> {m[256]:.5f}")
    return res.finish()


def _K_oracle(theta, Q, delta):
    """Independent 50-digit evaluation of the regime and the floored K."""
    with mpmath.workdps(50):
        t, Qm, d = mpmath.mpf(theta), mpmath.mpf(Q), mpmath.mpf(delta)
        L = mpmath.log(Qm)
        T = mpmath.exp((1 - 2 * t) / (2 - t) * L - (5 - t) / (2 - t) * mpmath.log(L))
        if d >= T:
            K = mpmath.exp(-mpmath.mpf(2) / 3 * mpmath.log(d) + L / 3 - mpmath.mpf(2) / 3 * mpmath.log(L))
            return 1, int(mpmath.floor(K))
        K = mpmath.exp((-2 * mpmath.log(d) + (1 + t) * L) / (5 - t))
        return 2, int(mpmath.floor(K))


def regime_suite(workers=1):
    """choose_K against a 50-digit oracle; regime two for theta <= 1/2, Q >= 10^3."""
    res = _new("regime")
    rng = np.random.default_rng(SEED)
    agree = 0
    bad = []
    for _ in range(50):
        theta = float(rng.uniform(0.05, 0.95))
        Q = float(10 ** rng.uniform(2, 8))
        lo = -(1 + theta) / (3 - theta) + 0.05
        delta = float(min(0.49, Q ** rng.uniform(lo, 0) * 0.49))
        got = choose_K(RegimeParams(theta, Q, delta))
        want = _K_oracle(theta, Q, delta)
        if (got.regime, got.K) == want:
            agree += 1
        else:
            bad.append((theta, Q, delta, (got.regime, got.K), want))
    res.add("choose_K matches the 50-digit oracle on 50 points", agree == 50, f"{agree}/50 {bad[:2]}")
    viol = []
    for theta in (0.1, 0.25, 0.4, 0.5):
        for Q in (1e3, 1e4, 1e6, 1e8):
            for delta in (1e-3, 0.01, 0.1, 0.49):
                if regime(RegimeParams(theta, Q, delta)) != 2:
                    viol.append((theta, Q, delta))
    res.add("theta <= 1/2, delta < 1/2, Q >= 10^3 always gives regime two", not viol,
            f"{len(viol)}/64 points in regime one, e.g. {viol[:3]}")
    return res.finish()


SUITES = {
    "dyadic": dyadic,
    "full_ratio": full_ratio,
    "block_ratio": block_ratio,
    "selberg": selberg_suite,
    "sandwich": sandwich,
    "oracle": oracle,
    "scaling": scaling,
    "exponent": exponent,
    "chain": chain,
    "regime": regime_suite,
}


def run(name, workers=1):
    """Run one registered suite (or ``"all"``); returns a list of :class:`SuiteResult`."""
    if name == "all":
        return [fn(workers) for fn in SUITES.values()]
    if name not in SUITES:
        raise KeyError(f"unknown suite {name!r}; choose from {sorted(SUITES)} or 'all'")
    return [SUITES[name](workers)]
