"""Compiled inner loops shared by the counting and oscillatory code.

Curves are passed to the kernels as ``(kind, coeffs, jet)``:

* ``kind`` -- integer code (see ``KIND_*``),
* ``coeffs`` -- float64 polynomial coefficients, lowest degree first
  (ignored by the non-polynomial kinds),
* ``jet`` -- ``[eta, f(eta), f'(eta), f''(eta), xi, f(xi), f'(xi), f''(xi)]``
  used for the quadratic extension outside ``[eta, xi]``.
"""

import math

import numpy as np
from numba import njit

KIND_POLY = 0
KIND_EXP = 1
KIND_SQRT = 2
KIND_CIRCLE = 3

TWO_PI = 2.0 * math.pi


@njit(cache=True, fastmath=True)
def fval(kind, coeffs, x, d):
    """Derivative ``d`` (0, 1 or 2) of the unextended curve at ``x``."""
    if kind == KIND_POLY:
        n = coeffs.shape[0]
        acc = 0.0
        if d == 0:
            for j in range(n - 1, -1, -1):
                acc = acc * x + coeffs[j]
        elif d == 1:
            for j in range(n - 1, 0, -1):
                acc = acc * x + j * coeffs[j]
        else:
            for j in range(n - 1, 1, -1):
                acc = acc * x + j * (j - 1) * coeffs[j]
        return acc
    elif kind == KIND_EXP:
        return math.exp(x)
    elif kind == KIND_SQRT:
        s = math.sqrt(x)
        if d == 0:
            return s
        elif d == 1:
            return 0.5 / s
        return -0.25 / (x * s)
    else:
        u = 1.0 - x * x
        s = math.sqrt(u)
        if d == 0:
            return s
        elif d == 1:
            return -x / s
        return -1.0 / (u * s)


@njit(cache=True, fastmath=True)
def fext(kind, coeffs, jet, x, d):
    """Curve extended to the real line by its quadratic jets at the endpoints."""
    if x < jet[0]:
        p, f0, f1, f2 = jet[0], jet[1], jet[2], jet[3]
    elif x > jet[4]:
        p, f0, f1, f2 = jet[4], jet[5], jet[6], jet[7]
    else:
        return fval(kind, coeffs, x, d)
    t = x - p
    if d == 0:
        return 0.5 * t * t * f2 + t * f1 + f0
    elif d == 1:
        return t * f2 + f1
    return f2


@njit(cache=True)
def _phase_and_scale(kind, coeffs, a, q):
    """Return ``q*f(a/q)`` and a magnitude bound used for the boundary band."""
    qf = float(q)
    if kind == KIND_POLY:
        x = a / qf
        n = coeffs.shape[0]
        acc = 0.0
        mag = 0.0
        ax = abs(x)
        for j in range(n - 1, -1, -1):
            acc = acc * x + coeffs[j]
            mag = mag * ax + abs(coeffs[j])
        return acc * qf, mag * qf
    elif kind == KIND_EXP:
        v = qf * math.exp(a / qf)
        return v, abs(v)
    elif kind == KIND_SQRT:
        v = math.sqrt(float(a) * qf)
        return v, v
    else:
        v = math.sqrt(qf * qf - float(a) * float(a))
        return v, v


@njit(cache=True, nogil=True)
def count_block(kind, coeffs, qs, a_lo, a_hi, delta, rtol, counts):
    """Count confident members for each q and collect ambiguous (a, q) pairs.

    ``counts[i]`` receives the number of ``a`` in ``[a_lo[i], a_hi[i]]`` whose
    floating distance is below ``delta`` by more than the boundary band.
    Returns an ``(m, 2)`` int64 array of pairs needing an exact decision.
    """
    cap = 1024
    cand = np.empty((cap, 2), dtype=np.int64)
    m = 0
    for i in range(qs.shape[0]):
        q = qs[i]
        c = 0
        for a in range(a_lo[i], a_hi[i] + 1):
            v, scale = _phase_and_scale(kind, coeffs, a, q)
            r = v - math.floor(v)
            dist = min(r, 1.0 - r)
            tol = rtol * max(1.0, scale)
            if abs(dist - delta) <= tol:
                if m == cap:
                    cap *= 2
                    grown = np.empty((cap, 2), dtype=np.int64)
                    grown[:m] = cand[:m]
                    cand = grown
                cand[m, 0] = a
                cand[m, 1] = q
                m += 1
            elif dist < delta:
                c += 1
        counts[i] = c
    return cand[:m]


@njit(cache=True, nogil=True)
def frac_values(kind, coeffs, qs, a_lo, a_hi):
    """Fractional parts of ``q*f(a/q)`` for every pair, flattened in (q, a) order."""
    total = 0
    for i in range(qs.shape[0]):
        if a_hi[i] >= a_lo[i]:
            total += a_hi[i] - a_lo[i] + 1
    out = np.empty(total, dtype=np.float64)
    pos = 0
    for i in range(qs.shape[0]):
        q = qs[i]
        for a in range(a_lo[i], a_hi[i] + 1):
            v, _ = _phase_and_scale(kind, coeffs, a, q)
            out[pos] = v - math.floor(v)
            pos += 1
    return out


@njit(cache=True, nogil=True)
def cos_series_sum(c, xs):
    """``sum_x [c[0] + 2 sum_{k>=1} c[k] cos(2 pi k x)]`` by Clenshaw's recurrence."""
    K = c.shape[0] - 1
    total = 0.0
    comp = 0.0
    for i in range(xs.shape[0]):
        t = TWO_PI * xs[i]
        cs = math.cos(t)
        b1 = 0.0
        b2 = 0.0
        for k in range(K, 0, -1):
            b0 = 2.0 * c[k] + 2.0 * cs * b1 - b2
            b2 = b1
            b1 = b0
        val = c[0] + b1 * cs - b2
        # Kahan summation over the points
        y = val - comp
        s = total + y
        comp = (s - total) - y
        total = s
    return total


@njit(cache=True, fastmath=True)
def _qsum_kernel(t, qa, qb):
    """``sum_{q=qa}^{qb} q e(q t)`` as (re, im)."""
    t = t - math.floor(t + 0.5)
    n = qb - qa + 1
    if n == 1:
        ang = TWO_PI * (qa * t - math.floor(qa * t))
        return qa * math.cos(ang), qa * math.sin(ang)
    if abs(t) * n < 0.05:
        re = 0.0
        im = 0.0
        for q in range(qa, qb + 1):
            ang = TWO_PI * q * t
            re += q * math.cos(ang)
            im += q * math.sin(ang)
        return re, im
    mid = 0.5 * (qa + qb)
    s1 = math.sin(math.pi * t)
    c1 = math.cos(math.pi * t)
    sn = math.sin(math.pi * n * t)
    cn = math.cos(math.pi * n * t)
    dk = sn / s1
    ddk = math.pi * (n * cn * s1 - sn * c1) / (s1 * s1)
    # e(mid t) * (mid D - i D'/(2 pi))
    ar = mid * dk
    ai = -ddk / TWO_PI
    ang = TWO_PI * (mid * t - math.floor(mid * t))
    ce = math.cos(ang)
    se = math.sin(ang)
    return ar * ce - ai * se, ar * se + ai * ce


@njit(cache=True, fastmath=True)
def _gl_panel(kind, coeffs, jet, k, h, qa, qb, lo, hi, nodes, weights):
    half = 0.5 * (hi - lo)
    mid = 0.5 * (hi + lo)
    re = 0.0
    im = 0.0
    for j in range(nodes.shape[0]):
        b = mid + half * nodes[j]
        phi = k * fext(kind, coeffs, jet, b, 0) - h * b
        r, i = _qsum_kernel(phi, qa, qb)
        re += weights[j] * r
        im += weights[j] * i
    return re * half, im * half


@njit(cache=True, fastmath=True)
def _rate(kind, coeffs, jet, k, h, qb, b):
    return qb * abs(k * fext(kind, coeffs, jet, b, 1) - h)


@njit(cache=True, fastmath=True)
def _next_end(kind, coeffs, jet, k, h, qb, x, hi, wmax):
    r0 = _rate(kind, coeffs, jet, k, h, qb, x)
    w = wmax if r0 * 8.0 * wmax <= 1.0 else 1.0 / (8.0 * r0)
    r1 = _rate(kind, coeffs, jet, k, h, qb, min(x + w, hi))
    if r1 * 8.0 * w > 1.0:
        w = 1.0 / (8.0 * r1)
    return min(x + w, hi)


@njit(cache=True, nogil=True, fastmath=True)
def osc_kernel(kind, coeffs, jet, k, h, qa, qb, lo, hi, nodes, weights, min_panels):
    """Integrate ``sum_{q=qa}^{qb} q e(q (k f(b) - h b))`` over ``[lo, hi]``.

    Panels are sized so that the phase at the largest ``q`` advances by at
    most 1/8 cycle. Each pair of panels is also integrated as one coarse
    panel; the summed ``|fine - coarse|`` is returned as the error estimate.
    Returns ``(re, im, err, npanels)``.
    """
    wmax = (hi - lo) / min_panels
    re = 0.0
    im = 0.0
    err = 0.0
    npan = 0
    e0 = lo
    while e0 < hi:
        e1 = _next_end(kind, coeffs, jet, k, h, qb, e0, hi, wmax)
        fr, fi = _gl_panel(kind, coeffs, jet, k, h, qa, qb, e0, e1, nodes, weights)
        npan += 1
        e2 = e1
        if e1 < hi:
            e2 = _next_end(kind, coeffs, jet, k, h, qb, e1, hi, wmax)
            r_b, i_b = _gl_panel(kind, coeffs, jet, k, h, qa, qb, e1, e2, nodes, weights)
            fr += r_b
            fi += i_b
            npan += 1
            cr, ci = _gl_panel(kind, coeffs, jet, k, h, qa, qb, e0, e2, nodes, weights)
            err += math.hypot(fr - cr, fi - ci)
        re += fr
        im += fi
        e0 = e2
    return re, im, err, npan
