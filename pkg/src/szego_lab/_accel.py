"""Hot loops for the annulus Laurent series, with numba and pure-numpy backends.

Set ``SZEGO_LAB_DISABLE_NUMBA=1`` to force the numpy path. Both backends sum
the same terms in the same order (n = 0, 1, -1, 2, -2, ...) with Kahan
compensation, so they agree to a few ulps.
"""

import math
import os

import numpy as np

try:
    import numba
except ImportError:  # pragma: no cover - numba is a declared dependency
    numba = None

USE_NUMBA = numba is not None and os.environ.get("SZEGO_LAB_DISABLE_NUMBA", "0") in ("", "0")

TWO_PI = 2.0 * math.pi


def _coefficients(r, bergman, n_pos, n_neg):
    # pos[k] t^k and neg[k] x^k, x = r^2 / t, are the n = k and n = -k terms of
    # the annulus kernel with arclength/area normalisation. Going through x keeps
    # negative powers from overflowing for tiny r.
    pos = np.zeros(n_pos + 1)
    neg = np.zeros(n_neg + 1)
    for k in range(1, n_pos + 1):
        if bergman:
            pos[k] = (k + 1) / (math.pi * (1.0 - r ** (2 * k + 2)))
        else:
            pos[k] = 1.0 / (TWO_PI * (1.0 + r ** (2 * k + 1)))
    for k in range(1, n_neg + 1):
        if bergman:
            if k == 1:
                neg[k] = 1.0 / (TWO_PI * -math.log(r) * r * r)
            else:
                neg[k] = (k - 1) / (math.pi * r * r * (1.0 - r ** (2 * k - 2)))
        else:
            neg[k] = 1.0 / (TWO_PI * r * (1.0 + r ** (2 * k - 1)))
    if bergman:
        base = 1.0 / (math.pi * (1.0 - r * r))
    else:
        base = 1.0 / (TWO_PI * (1.0 + r))
    return base, pos, neg


def _series_point(t, r, base, pos, neg):
    # Moments sum_n n^k c_n t^n, k = 0, 1, 2, Kahan-compensated.
    x = r * r / t
    n_pos = pos.shape[0] - 1
    n_neg = neg.shape[0] - 1
    s0 = base + 0j
    s1 = 0j
    s2 = 0j
    c0 = 0j
    c1 = 0j
    c2 = 0j
    tp = 1.0 + 0j
    xp = 1.0 + 0j
    top = n_pos if n_pos > n_neg else n_neg
    for k in range(1, top + 1):
        tp = tp * t
        xp = xp * x
        for sign in (1, -1):
            if sign == 1:
                if k > n_pos:
                    continue
                term = pos[k] * tp
                n = k
            else:
                if k > n_neg:
                    continue
                term = neg[k] * xp
                n = -k
            y = term - c0
            s = s0 + y
            c0 = (s - s0) - y
            s0 = s
            y = n * term - c1
            s = s1 + y
            c1 = (s - s1) - y
            s1 = s
            y = n * n * term - c2
            s = s2 + y
            c2 = (s - s2) - y
            s2 = s
    return s0, s1, s2


def _series_loop(t, r, base, pos, neg, out):
    for i in range(t.shape[0]):
        a, b, c = _series_point(t[i], r, base, pos, neg)
        out[0, i] = a
        out[1, i] = b
        out[2, i] = c


if USE_NUMBA:
    _series_point = numba.njit(cache=True)(_series_point)
    _series_loop_jit = numba.njit(cache=True)(_series_loop)
else:  # pragma: no cover - exercised via env flag in a subprocess test
    _series_loop_jit = None


def series_moments_numba(t, r, bergman, n_pos, n_neg):
    if _series_loop_jit is None:
        raise RuntimeError("numba backend disabled")
    t = np.ascontiguousarray(np.ravel(t), dtype=np.complex128)
    out = np.empty((3, t.shape[0]), dtype=np.complex128)
    base, pos, neg = _coefficients(float(r), bool(bergman), int(n_pos), int(n_neg))
    _series_loop_jit(t, float(r), base, pos, neg, out)
    return out


def series_moments_numpy(t, r, bergman, n_pos, n_neg):
    t = np.ravel(np.asarray(t, dtype=np.complex128))
    r = float(r)
    base, pos, neg = _coefficients(r, bool(bergman), int(n_pos), int(n_neg))
    x = r * r / t
    sums = np.zeros((3, t.shape[0]), dtype=np.complex128)
    comp = np.zeros_like(sums)
    sums[0] = base
    tp = np.ones_like(t)
    xp = np.ones_like(t)
    weights = np.empty((3, 1))
    for k in range(1, max(n_pos, n_neg) + 1):
        tp = tp * t
        xp = xp * x
        terms = []
        if k <= n_pos:
            terms.append((k, pos[k] * tp))
        if k <= n_neg:
            terms.append((-k, neg[k] * xp))
        for n, term in terms:
            weights[:, 0] = (1.0, n, n * n)
            y = weights * term - comp
            s = sums + y
            comp = (s - sums) - y
            sums = s
    return sums


def series_moments(t, r, bergman, n_pos, n_neg):
    """Return a (3, len(t)) array of sum_n n^k c_n t^n for k = 0, 1, 2."""
    if USE_NUMBA:
        return series_moments_numba(t, r, bergman, n_pos, n_neg)
    return series_moments_numpy(t, r, bergman, n_pos, n_neg)
