"""Small numerical helpers shared by the modules: endpoint limits and
finite-difference stencils."""
from __future__ import annotations

import math
from functools import lru_cache

import numpy as np

from .core import EPS, Interval


def limit_at(F, interval: Interval, side: str) -> float:
    """One-sided limit of ``F`` at an end of ``interval``.

    ``F`` is evaluated along a geometric sequence approaching the end (halving
    the distance to a finite end, doubling toward an infinite one).  The
    sequence is cut at the first increment lost in round-off (converged,
    Aitken-corrected when the preceding increments shrink geometrically).
    Without such a stall, geometric increments are extrapolated and anything
    else is a divergence to +-inf.
    """
    if side not in ("lo", "hi"):
        raise ValueError("side must be 'lo' or 'hi'")
    end = interval.lo if side == "lo" else interval.hi
    sign = -1.0 if side == "lo" else 1.0
    c = interval.midpoint()
    pts = []
    if math.isfinite(end):
        d = end - c
        for j in range(1, 1100):
            p = end - d * 2.0**-j
            if p == end or (pts and p == pts[-1]):
                break
            pts.append(p)
    else:
        pts = [c + sign * 2.0**j for j in range(0, 1021)]
    pts = np.asarray(pts)
    with np.errstate(all="ignore"):
        try:
            v = np.asarray(F(pts), dtype=float)
        except (ValueError, ArithmeticError):
            v = np.array([_safe(F, p) for p in pts])
    finite = np.isfinite(v)
    if not finite[0]:
        return float(v[0]) if not np.isnan(v[0]) else math.nan
    stop = np.argmin(finite) if not finite.all() else v.size
    v = v[:stop]
    if v.size < 3:
        return float(v[-1])
    if abs(v[-1]) > 1e300:
        return math.copysign(math.inf, v[-1])
    d = np.diff(v)
    # round-off level per step; the position term covers cancellation like y + P(y)
    noise = 64 * EPS * (1.0 + np.abs(v[1:]) + np.abs(pts[1:stop]))
    stall = np.nonzero(np.abs(d) <= noise)[0]
    if stall.size:
        i = int(stall[0])
        if i >= 2 and d[i - 2] != 0:
            q = d[i - 1] / d[i - 2]
            if 0 < q < 0.95:
                return float(v[i] + d[i - 1] * q / (1.0 - q))
        return float(v[i + 1])
    q = d[-1] / d[-2] if d[-2] != 0 else math.inf
    if 0 < q < 0.95:
        return float(v[-1] + d[-1] * q / (1.0 - q))
    return math.copysign(math.inf, d[-1])


def _safe(F, p):
    try:
        return float(F(p))
    except (ValueError, ArithmeticError):
        return math.nan


@lru_cache(maxsize=None)
def central_weights(order: int, m: int) -> np.ndarray:
    """Weights ``w`` with ``sum w_i f(i h) ~ h**order f^(order)(0)`` for ``i = -m..m``."""
    offsets = np.arange(-m, m + 1, dtype=float)
    n = offsets.size
    A = np.array([offsets**k / math.factorial(k) for k in range(n)])
    rhs = np.zeros(n)
    rhs[order] = 1.0
    return np.linalg.solve(A, rhs)


def _stencil_order(order: int, m: int) -> int:
    p = 2 * m + 1 - order
    return p if p % 2 == 0 else p + 1


def derivative_at(F, x0: float, order: int, step: float, m: int = 4) -> float:
    """``order``-th derivative of ``F`` at ``x0`` by a ``2m+1`` point central
    stencil, Richardson-extrapolated once (step and step/2)."""
    w = central_weights(order, m)
    offsets = np.arange(-m, m + 1, dtype=float)

    def D(hs):
        return float(np.dot(w, F(x0 + hs * offsets))) / hs**order

    p = _stencil_order(order, m)
    coarse, fine = D(step), D(step / 2)
    return (2**p * fine - coarse) / (2**p - 1)
