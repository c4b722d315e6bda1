"""Planar curves with sign-definite curvature, and their extension to the real line."""

from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
import hashlib

import numpy as np

from . import _kernels as kern

DEFAULT_SEED = 20240611
VALIDATION_GRID = 10_000

_KIND_CODES = {
    "poly": kern.KIND_POLY,
    "exp": kern.KIND_EXP,
    "sqrt": kern.KIND_SQRT,
    "circle": kern.KIND_CIRCLE,
}


class CurveError(ValueError):
    """Raised when a curve fails validation or cannot be constructed."""


def _as_fraction(v):
    if isinstance(v, Fraction):
        return v
    if isinstance(v, str):
        return Fraction(v.strip())
    return Fraction(v)


@dataclass(frozen=True, eq=False)
class Curve:
    """A C^2 curve ``y = f(x)`` on ``[eta, xi]`` with ``|f''| >= f2_lower > 0``.

    Parameters
    ----------
    id : str
        Short name used in reports and cache keys.
    eta, xi : Fraction
        Interval endpoints, stored exactly. Floats are converted with
        ``Fraction(float)``, i.e. to their exact binary value.
    kind : str
        One of ``"poly"``, ``"exp"``, ``"sqrt"``, ``"circle"``.
    theta : float
        Hoelder exponent claimed for ``f''``.
    f2_lower : float
        Certified lower bound for ``|f''|`` on ``[eta, xi]``.
    exact_form : tuple of Fraction, optional
        Rational polynomial coefficients (lowest degree first). Present
        for polynomial curves and enables the exact counting path.
    """

    id: str
    eta: Fraction
    xi: Fraction
    kind: str
    theta: float
    f2_lower: float
    exact_form: tuple = None
    lip_estimate: float = field(init=False, default=float("nan"))

    def __post_init__(self):
        object.__setattr__(self, "eta", _as_fraction(self.eta))
        object.__setattr__(self, "xi", _as_fraction(self.xi))
        if self.kind not in _KIND_CODES:
            raise CurveError(f"unknown curve kind {self.kind!r}")
        if self.kind == "poly":
            if not self.exact_form:
                raise CurveError("polynomial curve needs coefficients")
            object.__setattr__(
                self, "exact_form", tuple(_as_fraction(c) for c in self.exact_form)
            )
        if not self.eta < self.xi:
            raise CurveError(f"need eta < xi, got [{self.eta}, {self.xi}]")
        if not 0.0 < self.theta <= 1.0:
            raise CurveError(f"theta must lie in (0, 1], got {self.theta}")
        if not self.f2_lower > 0:
            raise CurveError("f2_lower must be positive")
        self._validate()

    def _validate(self):
        x = np.linspace(float(self.eta), float(self.xi), VALIDATION_GRID)
        d2 = self.f2(x)
        if not np.all(np.isfinite(d2)):
            raise CurveError(f"{self.id}: f'' not finite on the interval")
        if not (np.all(d2 > 0) or np.all(d2 < 0)):
            raise CurveError(f"{self.id}: f'' changes sign or vanishes")
        if np.min(np.abs(d2)) < self.f2_lower:
            raise CurveError(
                f"{self.id}: min |f''| = {np.min(np.abs(d2)):.6g} below f2_lower = {self.f2_lower}"
            )
        if self.exact_form is not None:
            ref = np.polynomial.polynomial.polyval(x, [float(c) for c in self.exact_form])
            if np.max(np.abs(ref - self.f(x))) > 1e-12 * max(1.0, np.max(np.abs(ref))):
                raise CurveError(f"{self.id}: exact_form disagrees with f")
        object.__setattr__(self, "lip_estimate", estimate_lip(self, self.theta, 200))

    # numeric views used by the kernels
    @cached_property
    def kind_code(self):
        return _KIND_CODES[self.kind]

    @cached_property
    def coeffs(self):
        if self.exact_form is None:
            return np.zeros(1)
        return np.array([float(c) for c in self.exact_form])

    @cached_property
    def jet(self):
        e, x = float(self.eta), float(self.xi)
        vals = []
        for p in (e, x):
            vals += [p] + [kern.fval(self.kind_code, self.coeffs, p, d) for d in range(3)]
        return np.array(vals)

    @property
    def length(self):
        return float(self.xi - self.eta)

    @property
    def degree(self):
        return None if self.exact_form is None else len(self.exact_form) - 1

    @cached_property
    def key(self):
        """Stable identifier including the defining data (for caches)."""
        data = repr((self.kind, str(self.eta), str(self.xi), self.exact_form and tuple(map(str, self.exact_form))))
        return f"{self.id}-{hashlib.sha1(data.encode()).hexdigest()[:10]}"

    def _eval(self, x, d, extended):
        fn = kern.fext if extended else kern.fval
        args = (self.kind_code, self.coeffs, self.jet) if extended else (self.kind_code, self.coeffs)
        if np.ndim(x) == 0:
            return fn(*args, float(x), d)
        x = np.asarray(x, dtype=float)
        return np.array([fn(*args, float(v), d) for v in x.ravel()]).reshape(x.shape)

    def f(self, x):
        return self._eval(x, 0, False)

    def f1(self, x):
        return self._eval(x, 1, False)

    def f2(self, x):
        return self._eval(x, 2, False)

    def shifted(self, n, m):
        """The polynomial curve ``f(x) + n*x + m`` (integers n, m)."""
        if self.exact_form is None:
            raise CurveError("integer shifts are only supported for polynomial curves")
        c = list(self.exact_form) + [Fraction(0)] * max(0, 2 - len(self.exact_form))
        c[0] += m
        c[1] += n
        return Curve(f"{self.id}+{n}x+{m}", self.eta, self.xi, "poly", self.theta,
                     self.f2_lower, tuple(c))


def eval_extended(c, beta):
    """f on the real line: itself on ``[eta, xi]``, its quadratic jet outside."""
    return c._eval(beta, 0, True)


def eval_extended_d1(c, beta):
    return c._eval(beta, 1, True)


def eval_extended_d2(c, beta):
    return c._eval(beta, 2, True)


def estimate_lip(c, theta, samples, seed=DEFAULT_SEED):
    """Largest Hoelder quotient of f'' over sampled pairs.

    The sample consists of both endpoints followed by ``samples - 2`` points
    drawn from a generator seeded with ``seed``; a larger ``samples`` extends
    the same sequence, so the estimate is non-decreasing in ``samples``.

    Returns
    -------
    float
        ``max |f''(x) - f''(y)| / |x - y|**theta`` over distinct sampled pairs.
    """
    if not 0.0 < theta <= 1.0:
        raise CurveError(f"theta must lie in (0, 1], got {theta}")
    if samples < 2:
        raise CurveError("need at least 2 samples")
    e, x = float(c.eta), float(c.xi)
    rng = np.random.default_rng(seed)
    pts = np.concatenate([[e, x], e + (x - e) * rng.random(samples - 2)])
    vals = c.f2(pts)
    best = 0.0
    for i in range(len(pts) - 1):
        dx = np.abs(pts[i + 1:] - pts[i])
        ok = dx > 0
        if np.any(ok):
            ratio = np.abs(vals[i + 1:][ok] - vals[i]) / dx[ok] ** theta
            best = max(best, float(ratio.max()))
    return best


def from_poly(coeffs, eta, xi, theta=0.75, name=None, f2_lower=None):
    """Polynomial curve from coefficients (lowest degree first).

    Coefficients may be ints, Fractions or ``"p/q"`` strings. When
    ``f2_lower`` is omitted it is taken as 0.99 of the grid minimum of ``|f''|``.
    """
    cs = tuple(_as_fraction(v) for v in coeffs)
    if len(cs) < 3:
        raise CurveError("polynomial must have degree >= 2")
    if f2_lower is None:
        grid = np.linspace(float(_as_fraction(eta)), float(_as_fraction(xi)), VALIDATION_GRID)
        d2 = np.polynomial.polynomial.polyval(
            grid, [float(j * (j - 1) * cs[j]) for j in range(2, len(cs))])
        f2_lower = 0.99 * float(np.min(np.abs(d2)))
        if f2_lower <= 0:
            raise CurveError("f'' vanishes on the interval")
    name = name or "poly[" + ",".join(str(v) for v in cs) + "]"
    return Curve(name, eta, xi, "poly", theta, f2_lower, cs)


_BUILTINS = {
    "parabola": lambda: Curve("parabola", 1, 2, "poly", 0.75, 2.0, (0, 0, 1)),
    "cubic": lambda: Curve("cubic", 1, 2, "poly", 0.75, 6.0, (0, 0, 0, 1)),
    "exp": lambda: Curve("exp", 0, 1, "exp", 0.75, 1.0),
    "sqrt": lambda: Curve("sqrt", 1, 2, "sqrt", 0.75, 0.088),
    "circle-arc": lambda: Curve("circle-arc", Fraction(-1, 2), Fraction(1, 2), "circle", 0.75, 1.0),
}


def builtin(name):
    """Registry curve by name: parabola, cubic, exp, sqrt, circle-arc."""
    try:
        return _BUILTINS[name]()
    except KeyError:
        raise CurveError(f"unknown builtin curve {name!r}; choose from {sorted(_BUILTINS)}") from None


def builtin_names():
    return sorted(_BUILTINS)


def from_spec(spec):
    """Curve from a config mapping: ``{name = ...}`` or ``{poly = [...], eta, xi, theta}``."""
    if isinstance(spec, str):
        return builtin(spec)
    if "name" in spec:
        return builtin(spec["name"])
    if "poly" in spec:
        try:
            eta, xi = spec["eta"], spec["xi"]
        except KeyError:
            raise CurveError("poly curve spec needs eta and xi") from None
        return from_poly(spec["poly"], eta, xi, float(spec.get("theta", 0.75)), spec.get("id"))
    raise CurveError(f"cannot build a curve from {spec!r}")
