"""Compiled inner loops.

A map is passed to the kernels as the 6-tuple ``(pz, qz, wz, pu, qu, wu)`` of
ascending coefficient arrays: numerator, denominator and Wronskian padded to
formal degrees ``d, d, 2d - 2`` for the ``Z`` chart, and their reversals for
the ``U`` chart (the ``U``-chart Wronskian carries a minus sign so that the
local derivative is ``W / Q**2`` or ``-W / P**2`` in either input chart).
"""
import math
import os

import numpy as np
from numba import config, njit, prange

if "NUMBA_THREADING_LAYER" not in os.environ:
    # the bundled TBB is too old for numba and only produces a warning
    config.THREADING_LAYER = "workqueue"

EPS = 2.220446049250313e-16


@njit(cache=True)
def abs2(x):
    return x.real * x.real + x.imag * x.imag


@njit(cache=True)
def horner(c, x):
    acc = 0j
    for k in range(c.shape[0] - 1, -1, -1):
        acc = acc * x + c[k]
    return acc


@njit(cache=True)
def eval_pqw(m, chart, x):
    if chart == 0:
        return horner(m[0], x), horner(m[1], x), horner(m[2], x)
    return horner(m[3], x), horner(m[4], x), horner(m[5], x)


@njit(cache=True)
def step(m, chart, x):
    """One application of the map: returns (log-norm, out chart, out coord, local derivative)."""
    P, Q, W = eval_pqw(m, chart, x)
    aw = abs(W)
    if aw == 0.0:
        ln = -np.inf
    else:
        ln = math.log(aw) + math.log1p(abs2(x)) - math.log(abs2(P) + abs2(Q))
    if abs(P) <= abs(Q):
        return ln, 0, P / Q, W / (Q * Q)
    return ln, 1, Q / P, -W / (P * P)


@njit(cache=True)
def log_norm(m, chart, x):
    P, Q, W = eval_pqw(m, chart, x)
    aw = abs(W)
    if aw == 0.0:
        return -np.inf
    return math.log(aw) + math.log1p(abs2(x)) - math.log(abs2(P) + abs2(Q))


@njit(cache=True)
def log_norm_many(m, charts, coords):
    out = np.empty(coords.shape[0])
    for i in range(coords.shape[0]):
        out[i] = log_norm(m, charts[i], coords[i])
    return out


@njit(cache=True)
def chain_log(m, chart, x, n):
    s = 0.0
    c = chart
    z = x
    for _ in range(n):
        ln, c, z, _d = step(m, c, z)
        if ln == -np.inf:
            return -np.inf
        s += ln
    return s


@njit(cache=True, parallel=True)
def chain_log_many(m, charts, coords, n):
    out = np.empty(coords.shape[0])
    for i in prange(coords.shape[0]):
        out[i] = chain_log(m, charts[i], coords[i], n)
    return out


@njit(cache=True)
def apply_many(m, charts, coords):
    oc = np.empty(coords.shape[0], dtype=np.uint8)
    oz = np.empty(coords.shape[0], dtype=np.complex128)
    for i in range(coords.shape[0]):
        _ln, c, z, _d = step(m, charts[i], coords[i])
        oc[i] = c
        oz[i] = z
    return oc, oz


@njit(cache=True)
def orbit(m, chart, x, n):
    """Charts, coords and log-norms along the first ``n`` points of an orbit."""
    oc = np.empty(n, dtype=np.uint8)
    oz = np.empty(n, dtype=np.complex128)
    ol = np.empty(n)
    c = chart
    z = x
    for j in range(n):
        oc[j] = c
        oz[j] = z
        ln, c, z, _d = step(m, c, z)
        ol[j] = ln
    return oc, oz, ol


@njit(cache=True)
def iterate_in_chart(m, chart, x, n):
    """Value and derivative of f^n at x, both expressed in the chart ``chart``.

    Intermediate points move to their canonical charts; only the final image
    is forced back into the input chart (used for Newton on f^n(z) = z).
    """
    c = chart
    z = x
    deriv = 1.0 + 0j
    for _ in range(n):
        _ln, c2, z2, d = step(m, c, z)
        deriv *= d
        c = c2
        z = z2
    if c != chart:
        # switch chart of the image: y -> 1/y
        deriv = -deriv / (z * z)
        z = 1.0 / z
    return z, deriv


@njit(cache=True)
def _nm_value(m, chart, re, im, n):
    v = chain_log(m, chart, complex(re, im), n)
    if v != v:
        return np.inf
    return -v


@njit(cache=True)
def polish(m, chart, x0, n, h, maxiter, ftol, xtol):
    """Nelder-Mead maximization of the chain log-norm in a fixed chart.

    Returns (best coord, best value, iterations used).
    """
    xs = np.empty((3, 2))
    fs = np.empty(3)
    xs[0, 0] = x0.real
    xs[0, 1] = x0.imag
    xs[1, 0] = x0.real + h
    xs[1, 1] = x0.imag
    xs[2, 0] = x0.real
    xs[2, 1] = x0.imag + h
    for k in range(3):
        fs[k] = _nm_value(m, chart, xs[k, 0], xs[k, 1], n)
    it = 0
    while it < maxiter:
        order = np.argsort(fs)
        xs = xs[order].copy()
        fs = fs[order].copy()
        fspread = fs[2] - fs[0]
        xspread = max(abs(xs[1, 0] - xs[0, 0]) + abs(xs[1, 1] - xs[0, 1]),
                      abs(xs[2, 0] - xs[0, 0]) + abs(xs[2, 1] - xs[0, 1]))
        if fspread <= ftol and xspread <= xtol:
            break
        it += 1
        cx = 0.5 * (xs[0, 0] + xs[1, 0])
        cy = 0.5 * (xs[0, 1] + xs[1, 1])
        rx = cx + (cx - xs[2, 0])
        ry = cy + (cy - xs[2, 1])
        fr = _nm_value(m, chart, rx, ry, n)
        if fr < fs[0]:
            ex = cx + 2.0 * (cx - xs[2, 0])
            ey = cy + 2.0 * (cy - xs[2, 1])
            fe = _nm_value(m, chart, ex, ey, n)
            if fe < fr:
                xs[2, 0] = ex
                xs[2, 1] = ey
                fs[2] = fe
            else:
                xs[2, 0] = rx
                xs[2, 1] = ry
                fs[2] = fr
            continue
        if fr < fs[1]:
            xs[2, 0] = rx
            xs[2, 1] = ry
            fs[2] = fr
            continue
        if fr < fs[2]:
            kx = cx + 0.5 * (rx - cx)
            ky = cy + 0.5 * (ry - cy)
        else:
            kx = cx + 0.5 * (xs[2, 0] - cx)
            ky = cy + 0.5 * (xs[2, 1] - cy)
        fk = _nm_value(m, chart, kx, ky, n)
        if fk < min(fr, fs[2]):
            xs[2, 0] = kx
            xs[2, 1] = ky
            fs[2] = fk
            continue
        for k in (1, 2):
            xs[k, 0] = xs[0, 0] + 0.5 * (xs[k, 0] - xs[0, 0])
            xs[k, 1] = xs[0, 1] + 0.5 * (xs[k, 1] - xs[0, 1])
            fs[k] = _nm_value(m, chart, xs[k, 0], xs[k, 1], n)
    best = int(np.argmin(fs))
    return complex(xs[best, 0], xs[best, 1]), -fs[best], it


# -- Aberth-Ehrlich ------------------------------------------------------------

@njit(cache=True)
def _newton_ratio(c, x):
    """p(x) / p'(x) and the relative backward error at x, overflow-free."""
    n = c.shape[0] - 1
    if abs(x) <= 1.0:
        p = 0j
        dp = 0j
        s = 0.0
        ax = abs(x)
        for k in range(n, -1, -1):
            dp = dp * x + p
            p = p * x + c[k]
            s = s * ax + abs(c[k])
        if dp == 0:
            return np.inf + 0j, abs(p) / s
        return p / dp, abs(p) / s
    # reversed polynomial q(y) = y^n p(1/y)
    y = 1.0 / x
    q = 0j
    dq = 0j
    s = 0.0
    ay = abs(y)
    for k in range(0, n + 1):
        dq = dq * y + q
        q = q * y + c[k]
        s = s * ay + abs(c[k])
    den = n * q - y * dq
    if den == 0:
        return np.inf + 0j, abs(q) / s
    return x * q / den, abs(q) / s


@njit(cache=True)
def _initial_guesses(c):
    """Bini's Newton-polygon starting points (c[0] and c[-1] nonzero)."""
    n = c.shape[0] - 1
    lg = np.empty(n + 1)
    for k in range(n + 1):
        a = abs(c[k])
        lg[k] = math.log(a) if a > 0 else -np.inf
    hull = np.empty(n + 1, dtype=np.int64)
    h = 0
    for k in range(n + 1):
        if lg[k] == -np.inf:
            continue
        while h >= 2:
            i0 = hull[h - 2]
            i1 = hull[h - 1]
            # drop i1 if it lies on or below the chord i0 -> k
            if (lg[i1] - lg[i0]) * (k - i0) <= (lg[k] - lg[i0]) * (i1 - i0):
                h -= 1
            else:
                break
        hull[h] = k
        h += 1
    x = np.empty(n, dtype=np.complex128)
    sigma = 0.7
    pos = 0
    for s in range(h - 1):
        i = hull[s]
        j = hull[s + 1]
        k = j - i
        r = math.exp((lg[i] - lg[j]) / k)
        for t in range(k):
            ang = 2.0 * math.pi * t / k + 2.0 * math.pi * i / n + sigma
            x[pos] = r * complex(math.cos(ang), math.sin(ang))
            pos += 1
    return x


@njit(cache=True)
def aberth(c, maxiter):
    """All roots of the polynomial with ascending coefficients ``c``.

    ``c`` has formal degree ``len(c) - 1``; exact zero leading coefficients
    give roots at infinity.  Roots come back as canonical homogeneous pairs
    ``(a, b)``.  Also returns the worst relative backward error and the number
    of sweeps.
    """
    n = c.shape[0] - 1
    ra = np.empty(n, dtype=np.complex128)
    rb = np.empty(n, dtype=np.complex128)
    top = n
    while top >= 0 and c[top] == 0:
        top -= 1
    low = 0
    while low < top and c[low] == 0:
        low += 1
    pos = 0
    for _ in range(n - top):
        ra[pos] = 1.0
        rb[pos] = 0.0
        pos += 1
    for _ in range(low):
        ra[pos] = 0.0
        rb[pos] = 1.0
        pos += 1
    m = top - low
    if m <= 0:
        return ra, rb, 0.0, 0
    cc = c[low:top + 1].copy()
    if m == 1:
        x = np.empty(1, dtype=np.complex128)
        x[0] = -cc[0] / cc[1]
        worst = 0.0
        sweeps = 0
    else:
        x = _initial_guesses(cc)
        done = np.zeros(m, dtype=np.bool_)
        sweeps = 0
        for sweeps in range(1, maxiter + 1):
            active = 0
            for i in range(m):
                if done[i]:
                    continue
                xi = x[i]
                N, be = _newton_ratio(cc, xi)
                if be <= 4.0 * EPS:
                    done[i] = True
                    continue
                active += 1
                S = 0j
                for j in range(m):
                    if j != i:
                        S += 1.0 / (xi - x[j])
                corr = N / (1.0 - N * S)
                if corr != corr or abs(corr) == np.inf:
                    continue
                x[i] = xi - corr
                if abs(corr) <= 4.0 * EPS * abs(x[i]):
                    done[i] = True
            if active == 0:
                break
        worst = 0.0
        for i in range(m):
            N, be = _newton_ratio(cc, x[i])
            if be > worst:
                worst = be
    for i in range(m):
        xi = x[i]
        if abs(xi) <= 1.0:
            ra[pos] = xi
            rb[pos] = 1.0
        else:
            ra[pos] = 1.0
            rb[pos] = 1.0 / xi
        pos += 1
    return ra, rb, worst, sweeps


@njit(cache=True)
def aberth_batch(C, maxiter):
    k, n1 = C.shape
    A = np.empty((k, n1 - 1), dtype=np.complex128)
    B = np.empty((k, n1 - 1), dtype=np.complex128)
    worst = np.empty(k)
    for r in range(k):
        a, b, w, _s = aberth(C[r].copy(), maxiter)
        A[r] = a
        B[r] = b
        worst[r] = w
    return A, B, worst


@njit(cache=True)
def fiber_poly(m, chart, w):
    """Coefficients whose roots (in ``[a:b]`` form) are the preimages of ``w``."""
    if chart == 0:
        return m[0] - w * m[1]
    return w * m[0] - m[1]


@njit(cache=True)
def _root_point(ra, rb):
    if abs(ra) <= abs(rb):
        return 0, ra / rb
    return 1, rb / ra


@njit(cache=True)
def backward_step(m, chart, x, choice, maxiter):
    ra, rb, worst, _s = aberth(fiber_poly(m, chart, x), maxiter)
    c, y = _root_point(ra[choice], rb[choice])
    return c, y, worst


@njit(parallel=True, cache=True)
def backward_endpoints(m, chart0, x0, choices, maxiter):
    """Endpoints of backward orbits, one row of preimage choices per path."""
    n, steps = choices.shape
    oc = np.empty(n, dtype=np.uint8)
    oz = np.empty(n, dtype=np.complex128)
    worst = np.zeros(n)
    for i in prange(n):
        c = chart0
        z = x0
        w = 0.0
        for j in range(steps):
            c, z, be = backward_step(m, c, z, choices[i, j], maxiter)
            if be > w:
                w = be
        oc[i] = c
        oz[i] = z
        worst[i] = w
    return oc, oz, worst


@njit(cache=True)
def backward_path(m, chart0, x0, choices, maxiter):
    """Whole backward orbit; entry ``k + 1`` is a preimage of entry ``k``."""
    steps = choices.shape[0]
    oc = np.empty(steps + 1, dtype=np.uint8)
    oz = np.empty(steps + 1, dtype=np.complex128)
    oc[0] = chart0
    oz[0] = x0
    w = 0.0
    for j in range(steps):
        c, z, be = backward_step(m, oc[j], oz[j], choices[j], maxiter)
        oc[j + 1] = c
        oz[j + 1] = z
        if be > w:
            w = be
    return oc, oz, w
