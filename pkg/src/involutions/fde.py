"""y'(t) = a y(h(t)) with the deviating argument h(t) = -t / (1 + t).

Differentiating once and using h(h(t)) = t turns the problem into the Euler
equation y'' = -a**2 y / (1 + t)**2 with y(0) = y0, y'(0) = a y0, which has
elementary solutions in four regimes of ``a``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import integrate
from scipy.interpolate import CubicHermiteSpline

from .core import DomainError, Interval

GUARD = 1e-6  # closest approach to t = -1
CRITICAL_BAND = 1e-12

OSCILLATORY = "oscillatory"
CRITICAL_PLUS = "critical+"
CRITICAL_MINUS = "critical-"
SUBCRITICAL = "subcritical"


def deviating(t):
    """``h(t) = -t / (1 + t)``."""
    t = np.asarray(t, dtype=float)
    return -t / (1.0 + t)


def regime(a: float) -> str:
    """Regime of ``a``; ``|a|`` within a relative ``1e-12`` of 1/2 counts as
    critical."""
    d = abs(a) - 0.5
    if abs(d) <= CRITICAL_BAND * 0.5:
        return CRITICAL_PLUS if a > 0 else CRITICAL_MINUS
    return OSCILLATORY if d > 0 else SUBCRITICAL


def _log1p_checked(t):
    t = np.asarray(t, dtype=float)
    if np.any(t <= -1.0):
        raise DomainError("closed forms are defined for t > -1 only")
    return np.log1p(t)


def closed_form(a: float, y0: float, t, derivative: bool = False):
    """Exact solution (or its derivative) at ``t``, dispatched on the regime.

    With ``u = log(1 + t)`` every regime reads ``y = y0 exp(u/2) F(u)``.
    """
    u = _log1p_checked(t)
    r = regime(a)
    grow = np.exp(0.5 * u)
    if r == OSCILLATORY:
        c = 0.5 * math.sqrt(4 * a * a - 1)
        beta = (2 * a - 1) / (2 * c)
        F = np.cos(c * u) + beta * np.sin(c * u)
        dF = -c * np.sin(c * u) + beta * c * np.cos(c * u)
    elif r == CRITICAL_PLUS:
        F, dF = np.ones_like(u), np.zeros_like(u)
    elif r == CRITICAL_MINUS:
        F, dF = 1.0 - u, -np.ones_like(u)
    else:
        b = math.sqrt(1 - 4 * a * a)
        A, B = b + 1 - 2 * a, b - 1 + 2 * a
        lo, hi = np.exp(-0.5 * b * u), np.exp(0.5 * b * u)
        F = (A * lo + B * hi) / (2 * b)
        dF = (-0.5 * b * A * lo + 0.5 * b * B * hi) / (2 * b)
    if not derivative:
        out = y0 * grow * F
    else:
        # dy/dt = (dy/du) / (1 + t) and 1 + t = exp(u)
        out = y0 * grow * (0.5 * F + dF) / np.exp(u)
    return float(out) if np.ndim(out) == 0 else out


@dataclass(frozen=True)
class FdeProblem:
    a: float
    y0: float
    t_span: Interval

    def __post_init__(self):
        if self.t_span.lo <= -1.0 or not math.isfinite(self.t_span.hi):
            raise DomainError(f"t_span must be a bounded subinterval of (-1, inf), got {self.t_span}")

    def coverage(self) -> Interval:
        """Smallest interval holding ``t_span`` and its image under ``h``."""
        lo, hi = self.t_span.lo, self.t_span.hi
        hs = deviating(np.array([lo, hi]))
        return Interval(min(lo, float(hs.min())), max(hi, float(hs.max())))


@dataclass(frozen=True)
class FdeSolution:
    """``y`` and ``y'`` on ``t_grid`` with a cubic Hermite interpolant."""

    t_grid: np.ndarray
    y: np.ndarray
    dy: np.ndarray
    regime: str
    a: float
    y0: float
    t_span: Interval

    @property
    def coverage(self) -> Interval:
        return Interval(float(self.t_grid[0]), float(self.t_grid[-1]))

    def _spline(self) -> CubicHermiteSpline:
        return CubicHermiteSpline(self.t_grid, self.y, self.dy, extrapolate=False)

    def __call__(self, t, nu: int = 0):
        t = np.asarray(t, dtype=float)
        if np.any((t < self.t_grid[0]) | (t > self.t_grid[-1])):
            raise DomainError(f"t outside the solved range [{self.t_grid[0]}, {self.t_grid[-1]}]")
        out = self._spline()(t, nu)
        return float(out) if out.ndim == 0 else out

    def rows(self, with_closed_form: bool = True) -> np.ndarray:
        """Columns ``t, y, y_closed_form, residual`` (residual of the original
        equation where ``h(t)`` is covered, ``nan`` elsewhere)."""
        t = self.t_grid
        ht = deviating(t)
        inside = (ht >= t[0]) & (ht <= t[-1])
        res = np.full(t.shape, np.nan)
        res[inside] = self.dy[inside] - self.a * self(ht[inside])
        exact = closed_form(self.a, self.y0, t) if with_closed_form else np.full(t.shape, np.nan)
        return np.column_stack([t, self.y, exact, res])


def _grid(cov: Interval, t_span: Interval, n: int) -> np.ndarray:
    """Uniform in ``log(1 + t)``, with 0 and the ends of ``t_span`` added."""
    u = np.linspace(math.log1p(cov.lo), math.log1p(cov.hi), n)
    t = np.expm1(u)
    t[0], t[-1] = cov.lo, cov.hi
    extra = np.array([v for v in (0.0, t_span.lo, t_span.hi) if cov.lo <= v <= cov.hi])
    close = np.any(np.abs(t[:, None] - extra[None, :]) <= 1e-9 * (1 + np.abs(extra)), axis=1)
    return np.unique(np.concatenate([t[~close], extra]))


def solve_numeric(p: FdeProblem, n: int = 4001, rtol: float = 1e-12,
                  atol: float = 1e-14) -> FdeSolution:
    """Integrate ``y'' = -a**2 y / (1 + t)**2`` from ``t = 0`` both ways.

    The range is widened to cover ``h(t_span)`` so the original equation can be
    checked; it must stay at least ``1e-6`` away from ``t = -1``.
    """
    cov = p.coverage()
    if cov.lo < -1.0 + GUARD:
        raise DomainError(f"the range reaches t={cov.lo!r}, within {GUARD:g} of the "
                          f"singularity at t = -1")
    grid = _grid(cov, p.t_span, n)
    a2 = p.a * p.a

    def rhs(t, u):
        return [u[1], -a2 * u[0] / (1.0 + t) ** 2]

    start = np.array([p.y0, p.a * p.y0])
    y = np.empty_like(grid)
    dy = np.empty_like(grid)
    i0 = int(np.searchsorted(grid, 0.0))
    for sl, end in ((slice(i0, None), grid[-1]), (slice(None, i0 + 1), grid[0])):
        ts = grid[sl]
        if end == 0.0 or ts.size < 2:
            y[sl], dy[sl] = start[0], start[1]
            continue
        order = ts if end > 0 else ts[::-1]
        sol = integrate.solve_ivp(rhs, (0.0, end), start, method="DOP853", t_eval=order,
                                  rtol=rtol, atol=atol)
        if sol.status != 0:
            raise DomainError(f"integration stopped at t={sol.t[-1]!r}: {sol.message}")
        vals = sol.y if end > 0 else sol.y[:, ::-1]
        y[sl], dy[sl] = vals[0], vals[1]
    return FdeSolution(grid, y, dy, regime(p.a), p.a, p.y0, p.t_span)


def closed_form_solution(p: FdeProblem, n: int = 4001) -> FdeSolution:
    """The exact solution tabulated on the same grid :func:`solve_numeric` uses."""
    grid = _grid(p.coverage(), p.t_span, n)
    return FdeSolution(grid, closed_form(p.a, p.y0, grid),
                       closed_form(p.a, p.y0, grid, derivative=True), regime(p.a), p.a,
                       p.y0, p.t_span)


def residual_check(sol: FdeSolution, a: float | None = None, t=None) -> float:
    """``max |y'(t) - a y(h(t))|`` over ``t`` (default: grid points of
    ``t_span``), with ``y(h(t))`` from the Hermite interpolant."""
    a = sol.a if a is None else a
    if t is None:
        g = sol.t_grid
        t = g[(g >= sol.t_span.lo) & (g <= sol.t_span.hi)]
    t = np.asarray(t, dtype=float)
    ht = deviating(t)
    cov = sol.coverage
    if np.any((ht < cov.lo) | (ht > cov.hi)):
        raise DomainError(f"h(t) leaves the solved range {cov}")
    dy = sol(t, 1)
    return float(np.max(np.abs(dy - a * sol(ht))))


def max_error(sol: FdeSolution, lo: float = 0.0, hi: float = 10.0) -> float:
    """Largest deviation from the closed form on grid points in ``[lo, hi]``."""
    g = sol.t_grid
    m = (g >= lo) & (g <= hi)
    return float(np.max(np.abs(sol.y[m] - closed_form(sol.a, sol.y0, g[m]))))


__all__ = [
    "GUARD", "OSCILLATORY", "CRITICAL_PLUS", "CRITICAL_MINUS", "SUBCRITICAL", "deviating",
    "regime", "closed_form", "FdeProblem", "FdeSolution", "solve_numeric",
    "closed_form_solution", "residual_check", "max_error",
]
