"""Building involutions from even functions and from symmetric equations.

Every involution ``h`` on ``J`` corresponds to an even function ``P`` on a
symmetric interval ``I``: with ``k(x) = x - h(x)`` one has
``P(y) = 2 k^{-1}(y) - y``, and conversely ``K(y) = (y + P(y)) / 2`` is
``k^{-1}``, so ``h(x) = x - K^{-1}(x)``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np
from scipy.interpolate import CubicHermiteSpline

from ._numerics import limit_at
from .core import (EPS, BracketError, DomainError, Interval, Involution, NotAnInvolutionError,
                   RealFunction, VerificationReport, verify_involution)


class MonotonicityError(ValueError):
    """A function assumed strictly increasing was caught decreasing."""


class NotEvenError(ValueError):
    pass


# ---------------------------------------------------------------------------
# Monotone inversion
# ---------------------------------------------------------------------------


class MonotoneInverse:
    """Numeric inverse of a strictly increasing ``K`` over ``bracket``.

    A ladder of points creeping geometrically toward both ends (and toward
    the bracket's midpoint) is evaluated once; each call then brackets its
    targets on the ladder, runs a few bisection steps and finishes with
    Newton steps when ``dK`` is known, falling back to bisection whenever
    Newton would leave the bracket.
    """

    def __init__(self, K, bracket: Interval | None = None, dK: Callable | None = None):
        if isinstance(K, RealFunction):
            if bracket is None:
                bracket = K.domain
            if dK is None and K.derivative is not None:
                dK = K.deriv
        if bracket is None:
            raise ValueError("bracket required for a bare callable")
        self.K, self.bracket, self.dK = K, bracket, dK
        ladder = bracket.ladder()
        with np.errstate(all="ignore"):
            vals = np.asarray(K(ladder), dtype=float)
        ok = np.isfinite(vals)
        if not ok.any():
            raise BracketError("K is not finite anywhere on the bracket")
        # keep the contiguous finite stretch around the reference point
        c = bracket.midpoint()
        mid = int(np.argmin(np.abs(ladder - c)))
        if not ok[mid]:
            good = np.nonzero(ok)[0]
            mid = int(good[good.size // 2])
        lo_i = hi_i = mid
        while lo_i > 0 and ok[lo_i - 1]:
            lo_i -= 1
        while hi_i < ladder.size - 1 and ok[hi_i + 1]:
            hi_i += 1
        ladder, vals = ladder[lo_i:hi_i + 1], vals[lo_i:hi_i + 1]
        # decreases at round-off level are tolerated: K may be computed with
        # cancellation (y + P(y) for large y) or be itself a numeric inverse
        near = np.abs(ladder - c) <= (abs(c) + 1.0)
        typical = float(np.max(np.abs(vals[near]), initial=0.0))
        slack = 64 * EPS * (np.abs(ladder[1:]) + np.abs(vals[1:]) + np.abs(vals[:-1]) + typical)
        drops = np.diff(vals) < -slack
        if np.any(drops):
            j = int(np.nonzero(drops)[0][0])
            raise MonotonicityError(f"K decreases between {ladder[j]!r} and {ladder[j + 1]!r}")
        self.ladder = ladder
        self.vals = np.maximum.accumulate(vals)

    @property
    def range(self) -> tuple[float, float]:
        return float(self.vals[0]), float(self.vals[-1])

    def __call__(self, x, tol: float = 0.0, strict: bool = True, n_bisect: int = 4,
                 maxiter: int = 200):
        K, dK, ladder, vals = self.K, self.dK, self.ladder, self.vals
        xa = np.asarray(x, dtype=float)
        shape = xa.shape
        xa = np.atleast_1d(xa).astype(float).ravel()
        out = np.full(xa.shape, np.nan)
        reach = (xa >= vals[0]) & (xa <= vals[-1])
        if strict and not reach.all():
            bad = xa[~reach][0]
            raise BracketError(f"{bad!r} is outside K(bracket) ~ [{vals[0]!r}, {vals[-1]!r}]")
        idx = np.clip(np.searchsorted(vals, xa, side="left"), 0, ladder.size - 1)
        hit = reach & (vals[idx] == xa)
        out[hit] = ladder[idx[hit]]
        work = reach & ~hit
        if work.any():
            out[work] = self._solve(xa[work], idx[work], tol, n_bisect, maxiter)
        return float(out[0]) if shape == () else out.reshape(shape)

    def _solve(self, t, ii, tol, n_bisect, maxiter):
        K, dK, ladder, vals = self.K, self.dK, self.ladder, self.vals
        below = np.maximum(ii - 1, 0)
        a, b = ladder[below], ladder[ii]
        fa, fb = vals[below] - t, vals[ii] - t
        closer = np.abs(fa) < np.abs(fb)
        y = np.where(closer, a, b)
        fy = np.where(closer, fa, fb)
        xtol = 1e-4 * EPS * (b - a)
        active = np.ones(t.shape, dtype=bool)
        for it in range(maxiter):
            cand = 0.5 * (a + b)
            if dK is not None and it >= n_bisect:
                with np.errstate(all="ignore"):
                    slope = np.asarray(dK(y), dtype=float)
                neg = active & np.isfinite(slope) & (slope < 0)
                if np.any(neg):
                    raise MonotonicityError(f"derivative of K is negative at {y[neg][0]!r}")
                with np.errstate(all="ignore"):
                    newton = y - fy / slope
                use = np.isfinite(newton) & (newton > a) & (newton < b) & (slope > 0)
                cand = np.where(use, newton, cand)
            cand = np.where(active, cand, y)
            with np.errstate(all="ignore"):
                fc = np.asarray(K(cand), dtype=float) - t
            step = np.abs(cand - y)
            a = np.where(active & (fc < 0), cand, a)
            b = np.where(active & (fc > 0), cand, b)
            y = np.where(active, cand, y)
            fy = np.where(active, fc, fy)
            ulp = 2 * np.spacing(np.abs(y)) + xtol
            done = ((np.abs(fc) <= tol) | (fc == 0) | (b - a <= ulp)
                    | ((it > n_bisect) & (step <= ulp)))
            active &= ~done
            if not active.any():
                break
        return y


def invert_monotone(K, x, bracket: Interval | None = None, tol: float = 0.0,
                    dK: Callable | None = None, strict: bool = True):
    """Solve ``K(y) = x`` for strictly increasing ``K`` (see :class:`MonotoneInverse`).

    Iteration stops at ``|K(y) - x| <= tol`` or when bracket or Newton step
    reach round-off, so ``tol=0`` means full precision.  Targets outside the
    attainable range raise :class:`BracketError`, or give ``nan`` when
    ``strict`` is false.
    """
    return MonotoneInverse(K, bracket, dK)(x, tol=tol, strict=strict)


# ---------------------------------------------------------------------------
# Even function -> involution
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class EvenFunction:
    """``P`` on a symmetric interval with ``P(0) = 0``; ``continuity`` is
    ``"C1"`` when ``P`` is continuously differentiable, ``"C0"`` otherwise."""

    P: RealFunction
    continuity: str = "C1"
    evenness_residual: float | None = None

    def __post_init__(self):
        if self.continuity not in ("C0", "C1"):
            raise ValueError("continuity must be 'C0' or 'C1'")
        if not self.P.domain.symmetric:
            raise NotEvenError(f"domain {self.P.domain} of P is not symmetric")

    @property
    def I(self) -> Interval:
        return self.P.domain

    def check(self, n: int = 201, tol: float = 1e-9) -> float:
        """Max ``|P(y) - P(-y)|`` on samples; raises if ``P`` is not even or ``P(0) != 0``."""
        p0 = self.P(0.0)
        if abs(p0) > tol:
            raise NotEvenError(f"P(0) = {p0!r}, expected 0")
        ys = self.I.sample(n)
        ys = ys[ys > 0]
        resid = float(np.max(np.abs(self.P(ys) - self.P(-ys)), initial=0.0))
        if resid > tol * (1.0 + float(np.max(np.abs(self.P(ys)), initial=0.0))):
            raise NotEvenError(f"P(y) - P(-y) reaches {resid:.3g}")
        return resid


@dataclass(frozen=True)
class ConstructionResult:
    h: Involution
    K: RealFunction
    k: RealFunction
    I: Interval
    J: Interval
    report: VerificationReport | None = None
    notes: tuple = field(default=())


def _scan_first_nonpositive(Kp, sign: float, limit: float) -> float:
    """Walk ``|y| = 2**j`` outward on one side; return ``|y|`` where ``Kp`` first
    drops to zero (refined by bisection), or ``inf`` if it never does before
    ``limit``.

    Detection needs ``Kp < 0``: a derivative like ``1 - tanh(y/2)`` rounds to
    exactly 0 far out while staying positive in exact arithmetic.
    """
    prev = 0.0
    for j in range(-20, 1024):
        y = 2.0**j
        at_edge = y >= limit
        if at_edge:
            y = limit * (1.0 - 1e-12)
        with np.errstate(over="ignore", invalid="ignore"):
            kp = Kp(sign * y)
        if kp < 0:
            a, b = prev, y
            while True:
                m = 0.5 * (a + b)
                if m in (a, b):
                    return b
                with np.errstate(over="ignore", invalid="ignore"):
                    up = Kp(sign * m) > 0
                if up:
                    a = m
                else:
                    b = m
        if at_edge:
            break
        if kp > 0:
            prev = y
    return math.inf


def maximal_interval(P: EvenFunction) -> Interval:
    """Largest symmetric ``(-r, r)`` inside ``P``'s domain with ``K' > 0``."""
    P.check()
    dom = P.I

    def Kp(y):
        return 0.5 * (1.0 + P.P.deriv(y))

    if Kp(0.0) <= 0:
        raise MonotonicityError("K'(0) <= 0")
    half = dom.hi
    r_right = _scan_first_nonpositive(Kp, 1.0, half)
    r_left = _scan_first_nonpositive(Kp, -1.0, half)
    r = min(r_left, r_right, half)
    return Interval(-r, r)


def certified_interval(P: EvenFunction, n: int = 10_000) -> Interval:
    """Largest symmetric interval on which sampled ``K`` is strictly increasing.

    A sampling certificate only: ``n`` points per side, geometric toward the
    domain edge.  Used for continuous ``P`` without a usable derivative.
    """
    P.check()
    dom = P.I
    u = np.linspace(0.0, 1.0, n + 1)[1:]
    pos = dom.from_unit(u)
    r = dom.hi
    for sign in (1.0, -1.0):
        ys = np.concatenate(([0.0], sign * pos))
        Kv = 0.5 * (ys + P.P(ys))
        bad = np.nonzero(sign * np.diff(Kv) <= 0)[0]
        if bad.size:
            r = min(r, abs(ys[bad[0]]))
    if r == 0:
        raise MonotonicityError("K is not increasing on any symmetric interval around 0")
    return Interval(-r, r)


def from_even_function(P: EvenFunction, n_verify: int = 101) -> ConstructionResult:
    """``h(x) = x - K^{-1}(x)`` with ``K(y) = (y + P(y)) / 2``."""
    if P.continuity == "C1":
        I = maximal_interval(P)
    else:
        I = certified_interval(P)
    p = P.P

    def K_func(y):
        return 0.5 * (y + p.func(y))

    K_deriv = None
    if p.derivative is not None:
        K_deriv = lambda y: 0.5 * (1.0 + p.derivative(y))  # noqa: E731
    K = RealFunction(K_func, I, K_deriv, "K")

    def end_value(side):
        end = I.lo if side == "lo" else I.hi
        if math.isfinite(end) and p.domain.contains(end):
            with np.errstate(all="ignore"):
                val = float(K_func(np.asarray(end)))
            if math.isfinite(val):
                return val
        return limit_at(K, I, side)

    lo_v, hi_v = end_value("lo"), end_value("hi")
    if not lo_v < hi_v:
        raise ArithmeticError(f"K cannot be evaluated at the ends of {I} "
                              f"(got {lo_v!r}, {hi_v!r}); P overflows there")
    J = Interval(lo_v, hi_v)

    inverse = MonotoneInverse(K, I)

    def k_func(x):
        # nan beyond the floating-point reach of K (far tails of an unbounded J)
        return inverse(x, strict=False)

    k_deriv = None
    if K_deriv is not None:
        k_deriv = lambda x: 1.0 / K_deriv(k_func(x))  # noqa: E731
    k = RealFunction(k_func, J, k_deriv, "k")

    def h_func(x):
        return x - k_func(x)

    h_deriv = None
    if k_deriv is not None:
        h_deriv = lambda x: 1.0 - k_deriv(x)  # noqa: E731
    smooth = P.continuity == "C1" and h_deriv is not None
    inv = Involution(RealFunction(h_func, J, h_deriv if smooth else None, "h"),
                     name=f"from_even({p.name or 'P'})", smooth=smooth,
                     info={"I": I, "P": P})
    report = verify_involution(inv, n_samples=n_verify) if n_verify else None
    return ConstructionResult(h=inv, K=K, k=k, I=I, J=J, report=report)


# ---------------------------------------------------------------------------
# Involution -> even function
# ---------------------------------------------------------------------------


def displacement(inv: Involution) -> RealFunction:
    """``k(x) = x - h(x)``, strictly increasing from ``J`` onto a symmetric ``I``."""
    f = inv.h
    deriv = None
    if inv.smooth:
        deriv = lambda x: 1.0 - f.deriv(x)  # noqa: E731
    return RealFunction(lambda x: x - f.func(x), f.domain, deriv, "k")


def symmetric_image(J: Interval) -> Interval:
    """``k(J)``: ``(inf J - sup J, sup J - inf J)`` for bounded ``J``, else the line."""
    if J.bounded:
        return Interval(J.lo - J.hi, J.hi - J.lo)
    return Interval.real_line()


def even_from_involution(inv: Involution, n_check: int = 201) -> EvenFunction:
    """``P(y) = 2 k^{-1}(y) - y`` on ``I = k(J)``.

    ``k^{-1}`` is numeric; targets beyond what ``k`` reaches in floating point
    (extreme tails of an unbounded ``I``) evaluate to ``nan``.
    """
    k = displacement(inv)
    I = symmetric_image(inv.J)

    inverse = MonotoneInverse(k, inv.J)

    def kinv(y):
        return inverse(y, strict=False)

    def P_func(y):
        return 2.0 * kinv(y) - y

    P_deriv = None
    if k.derivative is not None:
        def P_deriv(y):
            x = np.atleast_1d(kinv(y))
            out = np.full(x.shape, np.nan)
            ok = np.isfinite(x)
            out[ok] = 2.0 / k.derivative(x[ok]) - 1.0
            return out.reshape(np.shape(y))
    P = RealFunction(P_func, I, P_deriv, f"P[{inv.name}]")
    ys = I.sample(n_check)
    ys = ys[ys > 0]
    resid = float(np.nanmax(np.abs(P(ys) - P(-ys)), initial=0.0))
    return EvenFunction(P, "C1" if inv.smooth else "C0", evenness_residual=resid)


# ---------------------------------------------------------------------------
# Symmetric implicit equations
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class SymmetricEquation:
    """``f(x, y) = 0`` with ``f(x, y) = f(y, x)`` on the square ``omega x omega``."""

    f: Callable[[float, float], float]
    omega: Interval = field(default_factory=Interval.real_line)
    d1: Callable[[float, float], float] | None = None
    d2: Callable[[float, float], float] | None = None
    name: str = ""

    def partials(self, x: float, y: float) -> tuple[float, float]:
        if self.d1 is not None and self.d2 is not None:
            return float(self.d1(x, y)), float(self.d2(x, y))
        hx = 6e-6 * (1.0 + abs(x))
        hy = 6e-6 * (1.0 + abs(y))
        d1 = (self.f(x + hx, y) - self.f(x - hx, y)) / (2 * hx)
        d2 = (self.f(x, y + hy) - self.f(x, y - hy)) / (2 * hy)
        return float(d1), float(d2)

    def symmetry_residual(self, n: int = 15) -> float:
        pts = self.omega.sample(n)
        worst = 0.0
        for x in pts:
            for y in pts:
                a, b = self.f(x, y), self.f(y, x)
                worst = max(worst, abs(a - b) / (1.0 + abs(a)))
        return worst


def _newton(eq: SymmetricEquation, x: float, y0: float, tol: float = 1e-12,
            maxiter: int = 60) -> float | None:
    y = y0
    for _ in range(maxiter):
        fy = eq.f(x, y)
        _, d2 = eq.partials(x, y)
        if d2 == 0 or not math.isfinite(d2):
            return None
        step = fy / d2
        y -= step
        if not (math.isfinite(y) and eq.omega.contains(y)):
            return None
        if abs(step) <= tol * (1.0 + abs(y)):
            return y
    return None


def _bisect_root(eq: SymmetricEquation, x: float, y_prev: float, width: float) -> float | None:
    om = eq.omega
    for _ in range(40):
        a = max(y_prev - width, 0.5 * (om.lo + y_prev) if math.isfinite(om.lo) else -math.inf)
        b = min(y_prev + width, 0.5 * (om.hi + y_prev) if math.isfinite(om.hi) else math.inf)
        fa, fb = eq.f(x, a), eq.f(x, b)
        if fa == 0:
            return a
        if fb == 0:
            return b
        if (fa < 0) != (fb < 0):
            for _ in range(200):
                m = 0.5 * (a + b)
                if m in (a, b):
                    break
                fm = eq.f(x, m)
                if (fm < 0) == (fa < 0):
                    a, fa = m, fm
                else:
                    b = m
            return 0.5 * (a + b)
        width *= 2.0
    return None


def _trace(eq: SymmetricEquation, xs: np.ndarray, sign_d2: float):
    """March from the origin through ``xs`` (ordered outward); returns points,
    slopes and the reason the march stopped (``None`` if it ran to the end)."""
    pts, slopes = [], []
    x_prev, y_prev = 0.0, 0.0
    d1, d2 = eq.partials(0.0, 0.0)
    slope = -d1 / d2
    last_step = 0.0
    for x in xs:
        if not eq.omega.contains(x):
            return pts, slopes, f"x = {x!r} leaves the region"
        dx = x - x_prev
        pred = y_prev + slope * dx
        if not eq.omega.contains(pred):
            pred = y_prev
        y = _newton(eq, x, pred)
        if y is None or abs(y - pred) > 10.0 * (abs(slope * dx) + abs(last_step) + abs(dx)):
            y = _bisect_root(eq, x, y_prev, 2.0 * max(abs(last_step), abs(dx)))
        if y is None:
            return pts, slopes, f"no root found at x = {x!r}"
        if not eq.omega.contains(y):
            return pts, slopes, f"branch leaves the region at x = {x!r}"
        d1, d2 = eq.partials(x, y)
        if abs(d2) < 1e-8 * (1.0 + abs(d1)) or np.sign(d2) != sign_d2:
            return pts, slopes, f"d2f vanishes near ({x!r}, {y!r})"
        slope = -d1 / d2
        pts.append((x, y))
        slopes.append(slope)
        last_step = y - y_prev
        x_prev, y_prev = x, y
    return pts, slopes, None


def _monotone_slopes(x: np.ndarray, y: np.ndarray, m: np.ndarray) -> np.ndarray:
    """Fritsch-Carlson limiting of Hermite slopes for decreasing data."""
    m = m.copy()
    delta = np.diff(y) / np.diff(x)
    for i, d in enumerate(delta):
        if d == 0:
            m[i] = m[i + 1] = 0.0
            continue
        a, b = m[i] / d, m[i + 1] / d
        if a < 0:
            m[i] = 0.0
            a = 0.0
        if b < 0:
            m[i + 1] = 0.0
            b = 0.0
        s = a * a + b * b
        if s > 9.0:
            tau = 3.0 / math.sqrt(s)
            m[i] = tau * a * d
            m[i + 1] = tau * b * d
    return m


def tabulated_involution(xs, ys, slopes, name: str = "tabulated", info=None) -> Involution:
    """Involution interpolating the table ``(xs, ys)`` together with its mirror
    ``(ys, xs)``, by monotone cubic Hermite pieces."""
    xs = np.asarray(xs, float)
    ys = np.asarray(ys, float)
    slopes = np.asarray(slopes, float)
    with np.errstate(divide="ignore"):
        mirror_slopes = 1.0 / slopes
    X = np.concatenate((xs, ys))
    Y = np.concatenate((ys, xs))
    M = np.concatenate((slopes, mirror_slopes))
    order = np.argsort(X, kind="stable")
    X, Y, M = X[order], Y[order], M[order]
    keep = np.concatenate(([True], np.diff(X) > 1e-12 * (1.0 + np.abs(X[1:]))))
    X, Y, M = X[keep], Y[keep], M[keep]
    M = np.where(np.isfinite(M), M, -1e300)
    M = _monotone_slopes(X, Y, M)
    spline = CubicHermiteSpline(X, Y, M, extrapolate=False)
    dspline = spline.derivative()
    J = Interval(X[0], X[-1])
    tab_info = {"table_x": X, "table_y": Y}
    if info:
        tab_info.update(info)
    return Involution(RealFunction(spline, J, dspline, name), name=name, smooth=True,
                      info=tab_info)


def from_symmetric_equation(eq: SymmetricEquation, x_grid: Sequence[float],
                            sym_tol: float = 1e-10) -> Involution:
    """Trace the component of ``f = 0`` through the origin over ``x_grid``.

    Each side of the origin is marched outward, solving ``f(x, y) = 0`` for
    ``y`` by Newton from a tangent predictor (bisection fallback).  A side
    stops early when the point leaves the region or ``d2f`` effectively
    vanishes; ``info["truncated"]`` records why.
    """
    if not eq.omega.contains(0.0):
        raise ValueError("the region must contain the origin")
    f00 = eq.f(0.0, 0.0)
    if abs(f00) > 1e-12:
        raise ValueError(f"f(0, 0) = {f00!r}, expected 0")
    sym = eq.symmetry_residual()
    if sym > sym_tol:
        raise ValueError(f"f is not symmetric: |f(x,y) - f(y,x)| reaches {sym:.3g}")
    d1, d2 = eq.partials(0.0, 0.0)
    if d2 == 0 or abs(d2) < 1e-8 * (1.0 + abs(d1)):
        raise NotAnInvolutionError("d2f vanishes at the origin")
    grid = np.unique(np.asarray(x_grid, dtype=float))
    right = grid[grid > 0]
    left = grid[grid < 0][::-1]
    sign = float(np.sign(d2))
    rp, rs, r_stop = _trace(eq, right, sign)
    lp, ls, l_stop = _trace(eq, left, sign)
    pts = lp[::-1] + [(0.0, 0.0)] + rp
    slopes = np.array(ls[::-1] + [-d1 / d2] + rs)
    xs = np.array([p[0] for p in pts])
    ys = np.array([p[1] for p in pts])
    residual = float(max(abs(eq.f(x, y)) for x, y in pts))
    # keep the largest h-invariant interval inside the traced range, so both x
    # and h(x) sit among directly traced points rather than sparse mirror images
    lo, hi = max(xs[0], ys[-1]), min(xs[-1], ys[0])
    keep = (xs >= lo) & (xs <= hi)
    return tabulated_involution(
        xs[keep], ys[keep], slopes[keep], name=eq.name or "implicit",
        info={"truncated": {"left": l_stop, "right": r_stop}, "f_residual": residual,
              "symmetry_residual": sym, "trace_x": xs, "trace_y": ys})


# ---------------------------------------------------------------------------
# Presets
# ---------------------------------------------------------------------------


def even_preset(name: str, lam: float = 2.0) -> EvenFunction:
    """Built-in even functions: ``zero``, ``y2_over_8``, ``y6``, ``abs_lambda``, ``log_cosh``."""
    line = Interval.real_line()
    if name == "zero":
        return EvenFunction(RealFunction(lambda y: np.zeros_like(y), line,
                                         lambda y: np.zeros_like(y), "zero"))
    if name == "y2_over_8":
        return EvenFunction(RealFunction(lambda y: y * y / 8.0, line, lambda y: y / 4.0,
                                         "y2_over_8"))
    if name == "y6":
        return EvenFunction(RealFunction(lambda y: y**6, line, lambda y: 6.0 * y**5, "y6"))
    if name == "abs_lambda":
        if not lam > 0:
            raise ValueError(f"abs_lambda needs lambda > 0, got {lam}")
        c = (1.0 - lam) / (1.0 + lam)
        return EvenFunction(RealFunction(lambda y: c * np.abs(y), line, None, "abs_lambda"),
                            continuity="C0")
    if name == "log_cosh":
        # -2 ln cosh(y/2) written to avoid overflow
        def P(y):
            a = np.abs(y)
            return -a - 2.0 * np.log1p(np.exp(-a)) + 2.0 * math.log(2.0)

        return EvenFunction(RealFunction(P, line, lambda y: -np.tanh(y / 2.0), "log_cosh"))
    raise ValueError(f"unknown even preset {name!r}")


EVEN_ALIASES = {
    "0": "zero", "zero": "zero",
    "y^2/8": "y2_over_8", "y**2/8": "y2_over_8", "y2_over_8": "y2_over_8",
    "y^6": "y6", "y**6": "y6", "y6": "y6",
    "abs_lambda": "abs_lambda", "|y|": "abs_lambda",
    "log_cosh": "log_cosh", "-2ln(cosh(y/2))": "log_cosh",
}


def equation_preset(name: str) -> SymmetricEquation:
    """Built-in symmetric equations: ``linear``, ``hyperbola``, ``cubic2``."""
    if name == "linear":
        return SymmetricEquation(lambda x, y: x + y, Interval.real_line(),
                                 lambda x, y: 1.0, lambda x, y: 1.0, "linear")
    if name == "hyperbola":
        return SymmetricEquation(lambda x, y: x + y + x * y, Interval.real_line(),
                                 lambda x, y: 1.0 + y, lambda x, y: 1.0 + x, "hyperbola")
    if name == "cubic2":
        c = 2.0 ** (1.0 / 3.0) - 1.0
        return SymmetricEquation(lambda x, y: (x + 1) ** 3 + (y + 1) ** 3 - 2.0,
                                 Interval(-1.0, c),
                                 lambda x, y: 3.0 * (x + 1) ** 2,
                                 lambda x, y: 3.0 * (y + 1) ** 2, "cubic2")
    raise ValueError(f"unknown equation preset {name!r}")


def default_grid(omega: Interval, n: int = 2001, window: float = 8.0) -> np.ndarray:
    """Uniform grid over the region (clipped to ``[-window, window]``), ends excluded."""
    lo = omega.lo if math.isfinite(omega.lo) else -window
    hi = omega.hi if math.isfinite(omega.hi) else window
    lo, hi = max(lo, -window), min(hi, window)
    g = np.linspace(lo, hi, n)[1:-1]
    return np.union1d(g, [0.0])


__all__ = [
    "BracketError", "ConstructionResult", "DomainError", "EvenFunction", "MonotonicityError",
    "NotEvenError", "SymmetricEquation", "certified_interval", "default_grid", "displacement",
    "equation_preset", "even_from_involution", "even_preset", "from_even_function",
    "from_symmetric_equation", "invert_monotone", "maximal_interval", "symmetric_image",
    "tabulated_involution",
]
