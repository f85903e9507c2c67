"""Compiled inner loops for subsequence distance search.

All series handed to these kernels are *centred* (global mean removed) to keep
running sums small; z-normalisation of a window is then
``(xc[k + i] - mean_c[k]) * inv_std[k]``, with ``inv_std = 0`` marking a
constant window. That one expression is used for both shapelet extraction and
matching, so a shapelet compared against its own source window gives exactly 0.
"""

import numpy as np
from numba import njit

EPS = np.finfo(np.float64).eps
STD_FLOOR = 1e-12
# Safety factor on the floating-point error bounds used by the refine pass.
BOUND_SCALE = 64.0


@njit(cache=True, nogil=True)
def centre(x):
    m = x.shape[0]
    c = 0.0
    for i in range(m):
        c += x[i]
    c /= m
    xc = np.empty(m)
    for i in range(m):
        xc[i] = x[i] - c
    return xc, c


@njit(cache=True, nogil=True)
def window_stats(x, xc, length):
    """Rolling mean (of ``xc``) and inverse population std for every window."""
    m = xc.shape[0]
    n = m - length + 1
    s1 = np.zeros(m + 1)
    s2 = np.zeros(m + 1)
    for i in range(m):
        s1[i + 1] = s1[i] + xc[i]
        s2[i + 1] = s2[i] + xc[i] * xc[i]
    # run[i]: last index j with x[i..j] all equal to x[i]
    run = np.empty(m, dtype=np.int64)
    run[m - 1] = m - 1
    for i in range(m - 2, -1, -1):
        if x[i] == x[i + 1]:
            run[i] = run[i + 1]
        else:
            run[i] = i
    mean_c = np.empty(n)
    inv_std = np.empty(n)
    for k in range(n):
        a = (s1[k + length] - s1[k]) / length
        var = (s2[k + length] - s2[k]) / length - a * a
        mean_c[k] = a
        if run[k] >= k + length - 1 or var <= STD_FLOOR * STD_FLOOR:
            inv_std[k] = 0.0
        else:
            inv_std[k] = 1.0 / np.sqrt(var)
    return mean_c, inv_std, s2[m]


@njit(cache=True, nogil=True)
def extract(xc, mean_c, inv_std, start, length):
    out = np.empty(length)
    a = mean_c[start]
    s = inv_std[start]
    for i in range(length):
        out[i] = (xc[start + i] - a) * s
    return out


@njit(cache=True, nogil=True)
def sums(q):
    qq = 0.0
    sq = 0.0
    for i in range(q.shape[0]):
        qq += q[i] * q[i]
        sq += q[i]
    return qq, sq


@njit(cache=True, nogil=True)
def window_distance(q, xc, a, s, start, bound):
    """Squared distance to one window; stops once the sum reaches *bound*."""
    acc = 0.0
    for i in range(q.shape[0]):
        d = q[i] - (xc[start + i] - a) * s
        acc += d * d
        if acc >= bound:
            break
    return acc


@njit(cache=True, nogil=True)
def min_distance_direct(q, xc, mean_c, inv_std, early_abandon):
    """Minimum over all windows, accumulating each window element by element."""
    n = mean_c.shape[0]
    best = np.inf
    for k in range(n):
        bound = best if early_abandon else np.inf
        acc = window_distance(q, xc, mean_c[k], inv_std[k], k, bound)
        if acc < best:
            best = acc
    return best


@njit(cache=True, nogil=True)
def min_distance_refine(q, xc, mean_c, inv_std, dot, qq, sq, dot_err, s2_total):
    """Exact minimum using correlation-based estimates to skip windows.

    ``dot[k]`` approximates ``sum(q * xc[k:k + l])``. Each window gets an
    estimate and an error bound; only windows whose lower bound can beat the
    smallest upper bound are evaluated exactly with :func:`window_distance`.
    Constant windows have the exact distance ``qq`` and are never rescanned.
    The result equals :func:`min_distance_direct` whenever the bounds hold.
    """
    length = q.shape[0]
    n = mean_c.shape[0]
    est = np.empty(n)
    tol = np.empty(n)
    rounding = BOUND_SCALE * EPS * (qq + length) * (length + 1.0)
    best_upper = np.inf
    for k in range(n):
        s = inv_std[k]
        if s == 0.0:
            est[k] = qq
            tol[k] = 0.0
        else:
            est[k] = qq + length - 2.0 * s * (dot[k] - mean_c[k] * sq)
            tol[k] = (
                BOUND_SCALE * EPS * (2.0 * s * dot_err + s * s * s2_total) + rounding
            )
        upper = est[k] + tol[k]
        if upper < best_upper:
            best_upper = upper
    best = np.inf
    for k in range(n):
        if est[k] - tol[k] > best_upper:
            continue
        if inv_std[k] == 0.0:
            acc = qq
        else:
            acc = window_distance(q, xc, mean_c[k], inv_std[k], k, best)
        if acc < best:
            best = acc
    return best


@njit(cache=True, nogil=True)
def min_distance_raw(q, x, early_abandon):
    length = q.shape[0]
    n = x.shape[0] - length + 1
    best = np.inf
    for k in range(n):
        bound = best if early_abandon else np.inf
        acc = 0.0
        for i in range(length):
            d = q[i] - x[k + i]
            acc += d * d
            if acc >= bound:
                break
        if acc < best:
            best = acc
    return best
