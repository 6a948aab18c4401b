"""Quadrature building blocks: adaptive Gauss-Kronrod, oscillatory tails, Wynn epsilon."""

from __future__ import annotations

import heapq
import math
from typing import Callable

import numpy as np

from ..errors import ToleranceNotAchieved

# 15-point Kronrod extension of the 7-point Gauss rule (QUADPACK qk15).
_XGK = np.array(
    [
        0.991455371120812639206854697526329,
        0.949107912342758524526189684047851,
        0.864864423359769072789712788640926,
        0.741531185599394439863864773280788,
        0.586087235467691130294144845693013,
        0.405845151377397166906606412076961,
        0.207784955007898467600689403773245,
        0.000000000000000000000000000000000,
    ]
)
_WGK = np.array(
    [
        0.022935322010529224963732008058970,
        0.063092092629978553290700663189204,
        0.104790010322250183839876322541518,
        0.140653259715525918745189590510238,
        0.169004726639267902826583426598550,
        0.190350578064785409913256402421014,
        0.204432940075298892414161999234649,
        0.209482141084727828012999174891714,
    ]
)
_WG = np.array(
    [
        0.129484966168869693270611432679082,
        0.279705391489276667901467771423780,
        0.381830050505118944950369775488975,
        0.417959183673469387755102040816327,
    ]
)
KRONROD_NODES = np.concatenate([-_XGK[:-1], _XGK[::-1]])
KRONROD_WEIGHTS = np.concatenate([_WGK[:-1], _WGK[::-1]])
GAUSS_WEIGHTS = np.zeros(15)
GAUSS_WEIGHTS[[1, 3, 5, 7, 9, 11, 13]] = np.concatenate([_WG[:-1], _WG[::-1]])

Integrand = Callable[[np.ndarray], np.ndarray]


def gk15(f: Integrand, a: float, b: float) -> tuple[float, float]:
    """Kronrod estimate on [a, b] and a QUADPACK-style error estimate."""
    half = 0.5 * (b - a)
    mid = 0.5 * (a + b)
    fx = f(mid + half * KRONROD_NODES)
    k = float(KRONROD_WEIGHTS @ fx) * half
    g = float(GAUSS_WEIGHTS @ fx) * half
    mean = k / (2 * half) if half else 0.0
    resasc = abs(half) * float(KRONROD_WEIGHTS @ np.abs(fx - mean))
    err = abs(k - g)
    if resasc and err:
        err = resasc * min(1.0, (200.0 * err / resasc) ** 1.5)
    return k, err


def adaptive_gk(
    f: Integrand,
    a: float,
    b: float,
    abs_tol: float = 0.0,
    rel_tol: float = 1e-10,
    max_intervals: int = 2000,
) -> tuple[float, float]:
    """Globally adaptive bisection driven by the largest local error.

    Returns ``(value, error_estimate)``; raises ToleranceNotAchieved if the
    budget of intervals runs out first.
    """
    if a == b:
        return 0.0, 0.0
    v, e = gk15(f, a, b)
    heap = [(-e, a, b, v)]
    total_v, total_e = v, e
    while total_e > max(abs_tol, rel_tol * abs(total_v)):
        if len(heap) >= max_intervals:
            raise ToleranceNotAchieved(
                f"adaptive quadrature on [{a}, {b}] stopped at error {total_e:.3g}", total_e
            )
        neg_e, lo, hi, val = heapq.heappop(heap)
        c = 0.5 * (lo + hi)
        v1, e1 = gk15(f, lo, c)
        v2, e2 = gk15(f, c, hi)
        heapq.heappush(heap, (-e1, lo, c, v1))
        heapq.heappush(heap, (-e2, c, hi, v2))
        # re-sum rather than update incrementally to keep the totals exact-ish
        total_v = math.fsum(item[3] for item in heap)
        total_e = math.fsum(-item[0] for item in heap)
    return total_v, total_e


def wynn_epsilon(partial_sums) -> tuple[float, float]:
    """Wynn's epsilon extrapolation of a sequence of partial sums.

    Returns the best even-column estimate and the spread between the last two
    estimates of that column as an error indicator.
    """
    s = [float(x) for x in partial_sums]
    n = len(s)
    if n < 3:
        return s[-1], abs(s[-1] - s[-2]) if n > 1 else math.inf
    prev = [0.0] * (n + 1)
    cur = s[:]
    best, best_err = s[-1], abs(s[-1] - s[-2])
    col = 0
    while len(cur) > 1:
        nxt = []
        for i in range(len(cur) - 1):
            diff = cur[i + 1] - cur[i]
            if diff == 0.0:
                nxt.append(math.inf)
            else:
                nxt.append(prev[i + 1] + 1.0 / diff)
        prev, cur = cur, nxt
        col += 1
        if col % 2 == 0 and len(cur) >= 2 and all(math.isfinite(c) for c in cur[-2:]):
            err = abs(cur[-1] - cur[-2])
            if err < best_err:
                best, best_err = cur[-1], err
    return best, best_err


def oscillatory_tail(
    f: Integrand,
    start: float,
    half_period: float,
    abs_tol: float,
    min_terms: int = 8,
    max_terms: int = 400,
) -> tuple[float, float]:
    """``int_start^inf f`` for an integrand with decaying, asymptotically periodic
    oscillation of the given half period.

    The range is cut into half periods, each integrated adaptively, and the
    sequence of partial sums is accelerated with Wynn's epsilon algorithm.
    """
    sums = []
    total = 0.0
    est, err = math.nan, math.inf
    lo = start
    for n in range(max_terms):
        hi = lo + half_period
        piece, _ = adaptive_gk(f, lo, hi, abs_tol=abs_tol * 1e-3, rel_tol=1e-13)
        total += piece
        sums.append(total)
        lo = hi
        if n + 1 >= min_terms:
            est, err = wynn_epsilon(sums[-min(len(sums), 40):])
            if err <= abs_tol:
                return est, err
    raise ToleranceNotAchieved(f"oscillatory tail from {start} did not converge (error {err:.3g})", err)


def gauss_legendre_composite(f: Integrand, a: float, b: float, panels: int, order: int = 20) -> float:
    """Composite Gauss-Legendre rule with ``panels`` equal panels."""
    x, w = np.polynomial.legendre.leggauss(order)
    edges = np.linspace(a, b, panels + 1)
    half = 0.5 * np.diff(edges)
    mids = 0.5 * (edges[1:] + edges[:-1])
    nodes = (mids[:, None] + half[:, None] * x[None, :]).ravel()
    weights = (half[:, None] * w[None, :]).ravel()
    return math.fsum(weights * f(nodes))
