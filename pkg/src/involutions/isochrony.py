"""Isochronous potentials built from involutions, the reverse pairing of a
potential well into an involution, and two independent period estimators."""
from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Callable, Mapping, Sequence

import numpy as np
from scipy import integrate
from scipy.special import beta as beta_fn

from ._numerics import derivative_at, limit_at
from .construct import MonotoneInverse
from .core import (EPS, DomainError, Interval, Involution, RealFunction, catalog,
                   verify_involution)

TWO_PI = 2.0 * math.pi


class EnergyError(ValueError):
    """Energy level without two turning points inside the well."""


class WellError(ValueError):
    """The potential is not a well around the origin."""


@dataclass(frozen=True)
class Potential:
    """``V`` on ``J`` with force term ``g = V'`` and linear frequency ``omega``.

    ``derivatives`` optionally maps an order ``n`` (2..6) to an analytic
    ``V^(n)``; they are used by :func:`necessary_conditions`.  ``omega`` is
    ``None`` for degenerate wells such as ``x**4 / 4``.
    """

    V: RealFunction
    g: RealFunction
    omega: float | None
    involution: Involution | None = None
    derivatives: Mapping[int, Callable] = field(default_factory=dict, repr=False)
    name: str = ""
    _cache: dict = field(default_factory=dict, compare=False, repr=False)

    def __post_init__(self):
        if self.omega is not None and not self.omega > 0:
            raise ValueError(f"omega must be positive, got {self.omega!r}")
        if not self.J.contains(0.0):
            raise WellError(f"0 is not inside {self.J}")

    @property
    def J(self) -> Interval:
        return self.V.domain

    @property
    def target_period(self) -> float:
        return TWO_PI / self.omega if self.omega else math.nan

    def energy_max(self) -> float:
        """Lowest of the one-sided limits of ``V`` at the ends of ``J``."""
        if "emax" not in self._cache:
            lo = limit_at(self.V, Interval(self.J.lo, 0.0), "lo")
            hi = limit_at(self.V, Interval(0.0, self.J.hi), "hi")
            self._cache["emax"] = min(lo, hi)
        return self._cache["emax"]

    def _branch(self, side: str) -> MonotoneInverse:
        # V restricted to one side, written as an increasing function of |x|
        key = "branch_" + side
        if key not in self._cache:
            V, g = self.V, self.g
            if side == "hi":
                W = RealFunction(V.func, Interval(0.0, self.J.hi), g.func, "V+")
            else:
                W = RealFunction(lambda s: V.func(-s), Interval(0.0, -self.J.lo),
                                 lambda s: -g.func(-s), "V-")
            self._cache[key] = MonotoneInverse(W)
        return self._cache[key]

    def turning_points(self, E):
        """``x-(E) < 0 < x+(E)`` with ``V(x+-) = E``."""
        Ea = np.asarray(E, dtype=float)
        if np.any(Ea <= 0):
            raise EnergyError("energies must be positive")
        try:
            xp = self._branch("hi")(Ea)
            xm = -np.asarray(self._branch("lo")(Ea))
        except (ValueError, ArithmeticError) as exc:
            raise EnergyError(f"no turning points for E={E!r} in {self.J}: {exc}") from exc
        if Ea.ndim == 0:
            return float(xm), float(xp)
        return xm, xp


def _second_derivative_at_zero(V: RealFunction) -> float:
    dist = min(-V.domain.lo, V.domain.hi, 1.0)
    return derivative_at(V, 0.0, 2, 1e-3 * dist)


def recover_omega(V: RealFunction) -> float:
    """``sqrt(V''(0))`` by a Richardson-extrapolated central difference."""
    v2 = _second_derivative_at_zero(V)
    if not v2 > 0:
        raise WellError(f"V''(0) = {v2!r} is not positive; the origin is not a center")
    return math.sqrt(v2)


def potential_from_function(V: Callable, J: Interval = Interval.real_line(),
                            g: Callable | None = None, omega: float | None = None,
                            derivatives: Mapping[int, Callable] | None = None,
                            name: str = "", center: bool = True) -> Potential:
    """Wrap a user potential.  Missing ``g`` falls back to centered differences,
    missing ``omega`` to ``sqrt(V''(0))`` (skipped when ``center`` is false)."""
    Vf = RealFunction(V, J, g, name or "V")
    gf = RealFunction(g if g is not None else Vf.deriv, J,
                      (derivatives or {}).get(2), "g")
    if omega is None and center:
        omega = recover_omega(Vf)
    return Potential(Vf, gf, omega, derivatives=dict(derivatives or {}), name=name)


def potential_from_involution(inv: Involution, omega: float = 1.0) -> Potential:
    """``V = omega**2 (x - h)**2 / 8`` and ``g = omega**2 (x - h)(1 - h') / 4``."""
    if not omega > 0:
        raise ValueError(f"omega must be positive, got {omega!r}")
    h = inv.h
    w2 = omega * omega

    def V(x):
        return w2 * (x - h.func(x)) ** 2 / 8.0

    def g(x):
        return w2 * (x - h.func(x)) * (1.0 - h.deriv(x)) / 4.0

    Vf = RealFunction(V, inv.J, g, f"V[{inv.name}]")
    gf = RealFunction(g, inv.J, None, f"g[{inv.name}]")
    return Potential(Vf, gf, omega, involution=inv, name=f"isochronous[{inv.name}]")


# ---------------------------------------------------------------------------
# Potential -> involution
# ---------------------------------------------------------------------------


def _certified_reach(V: RealFunction, end: float, n: int) -> float:
    """Largest ``r`` such that ``V(s)`` sampled on ``(0, r)`` toward ``end`` is
    strictly increasing in ``|s|``; ``end`` itself when nothing fails."""
    side = Interval(0.0, end) if end > 0 else Interval(end, 0.0)
    pts = side.sample(n)
    pts = pts[np.argsort(np.abs(pts))]
    with np.errstate(all="ignore"):
        vals = np.asarray(V(pts), dtype=float)
    blank = ~np.isfinite(vals)
    drop = np.zeros(vals.shape, dtype=bool)
    drop[1:] = np.diff(vals) <= 0
    drop[0] = vals[0] <= 0
    bad = blank | drop
    if not bad.any():
        return end
    i = int(np.argmax(bad))
    # a failed increase at i puts the crest anywhere in (pts[i-2], pts[i])
    keep = i - 1 if blank[i] and not drop[i] else i - 2
    if keep < 0:
        raise WellError("V does not increase away from 0")
    return float(pts[keep])


def involution_from_potential(pot: Potential, n_certify: int = 2001,
                              n_verify: int = 101) -> Involution:
    """Level pairing: ``h(x)`` is the opposite-sign point with ``V(h(x)) = V(x)``.

    The well is certified by sampling ``V`` on both sides; when the check
    fails, the domain shrinks to the largest certified sub-well and the
    returned ``info`` says so.  ``h' = g(x) / g(h(x))``.
    """
    V = pot.V
    if abs(V(0.0)) > 1e-14:
        raise WellError(f"V(0) = {V(0.0)!r}, expected 0")
    lo = _certified_reach(V, pot.J.lo, n_certify)
    hi = _certified_reach(V, pot.J.hi, n_certify)
    shrunk = (lo != pot.J.lo) or (hi != pot.J.hi)
    well = Interval(lo, hi)
    if shrunk:
        pot = Potential(RealFunction(V.func, well, V.derivative, V.name),
                        RealFunction(pot.g.func, well, pot.g.derivative, pot.g.name),
                        pot.omega, derivatives=pot.derivatives, name=pot.name)
    emax = pot.energy_max()
    # ends of J: the side reaching the lower wall keeps its end, the other is cut
    lo_end, hi_end = well.lo, well.hi
    if math.isfinite(emax):
        left = limit_at(pot.V, Interval(well.lo, 0.0), "lo")
        right = limit_at(pot.V, Interval(0.0, well.hi), "hi")
        if left > emax:
            lo_end = -float(pot._branch("lo")(emax))
        if right > emax:
            hi_end = float(pot._branch("hi")(emax))
    J = Interval(lo_end, hi_end)
    pos, neg = pot._branch("hi"), pot._branch("lo")
    Vfun, gfun = pot.V.func, pot.g

    def h(x):
        xa = np.atleast_1d(np.asarray(x, dtype=float))
        out = np.zeros(xa.shape)
        e = Vfun(xa)
        right = xa > 0
        left = xa < 0
        if right.any():
            out[right] = -np.asarray(neg(e[right], strict=False))
        if left.any():
            out[left] = pos(e[left], strict=False)
        return out.reshape(np.shape(x))

    def dh(x):
        xa = np.atleast_1d(np.asarray(x, dtype=float))
        out = np.full(xa.shape, -1.0)
        nz = xa != 0
        if nz.any():
            y = h(xa[nz])
            out[nz] = gfun(xa[nz]) / gfun(y)
        return out.reshape(np.shape(x))

    inv = Involution(RealFunction(h, J, dh, "h"), name=f"level_pairing[{pot.name}]",
                     info={"well": well, "shrunk": shrunk, "energy_max": emax})
    if n_verify:
        report = verify_involution(inv, n_samples=n_verify)
        inv.info["report"] = report
    return inv


# ---------------------------------------------------------------------------
# Periods
# ---------------------------------------------------------------------------


def period_quadrature(pot: Potential, E: float, epsrel: float = 1e-10) -> float:
    """``T = sqrt(2) * int dx / sqrt(E - V)`` between the turning points.

    With ``x = x- + (x+ - x-) sin(t)**2`` the integrand is bounded.  Within
    ``1e-7`` of a turning point ``E - V`` is replaced by its linear model so
    round-off in the turning points cannot produce a negative radicand.
    """
    xm, xp = pot.turning_points(E)
    width = xp - xm
    V = pot.V.func
    g = pot.g
    gm, gp = abs(float(g(np.asarray(xm)))), abs(float(g(np.asarray(xp))))
    near = 1e-7 * width

    def integrand(t):
        s, c = math.sin(t), math.cos(t)
        dl, dr = width * s * s, width * c * c
        if dl < near:
            gap = gm * dl
        elif dr < near:
            gap = gp * dr
        else:
            gap = E - float(V(np.asarray(xm + dl)))
        if gap <= 0:
            gap = max(gm * dl, gp * dr, np.finfo(float).tiny)
        return 2.0 * width * s * c / math.sqrt(gap)

    val, err = integrate.quad(integrand, 0.0, 0.5 * math.pi, epsabs=0.0, epsrel=epsrel,
                              limit=400)
    if not math.isfinite(val) or err > 1e3 * epsrel * abs(val):
        raise ArithmeticError(f"period quadrature did not converge at E={E!r} (err {err:.3g})")
    return math.sqrt(2.0) * val


def _return_times(accel: Callable, x0: np.ndarray, dt: np.ndarray, max_steps: int) -> np.ndarray:
    """Velocity Verlet from ``(x0, 0)`` until the velocity next changes sign
    from positive to non-positive (the orbit is back at its right turning
    point).  The crossing time is refined with the cubic Hermite interpolant
    of ``v`` (its slopes are the accelerations)."""
    x = x0.copy()
    v = np.zeros_like(x)
    a = accel(x)
    out = np.full(x.shape, np.nan)
    active = np.ones(x.shape, dtype=bool)
    seen_negative = np.zeros(x.shape, dtype=bool)
    for n in range(1, max_steps + 1):
        vh = v + 0.5 * dt * a
        x_new = x + dt * vh
        a_new = np.where(active, accel(np.where(active, x_new, x0)), a)
        v_new = vh + 0.5 * dt * a_new
        seen_negative |= v_new < 0
        hit = active & seen_negative & (v > 0) & (v_new <= 0)
        if hit.any():
            for i in np.nonzero(hit)[0]:
                out[i] = (n - 1) * dt[i] + dt[i] * _hermite_root(v[i], v_new[i], a[i], a_new[i],
                                                                 dt[i])
            active &= ~hit
        x, v, a = x_new, v_new, a_new
        if not active.any():
            break
    return out


def _hermite_root(v0, v1, a0, a1, dt) -> float:
    """Root in [0, 1] of the cubic Hermite interpolant of v (Newton from the
    linear guess, a few steps are plenty)."""
    s = v0 / (v0 - v1) if v0 != v1 else 0.5
    m0, m1 = a0 * dt, a1 * dt
    for _ in range(8):
        h00 = 2 * s**3 - 3 * s**2 + 1
        h10 = s**3 - 2 * s**2 + s
        h01 = -2 * s**3 + 3 * s**2
        h11 = s**3 - s**2
        f = h00 * v0 + h10 * m0 + h01 * v1 + h11 * m1
        df = (6 * s**2 - 6 * s) * v0 + (3 * s**2 - 4 * s + 1) * m0 \
            + (-6 * s**2 + 6 * s) * v1 + (3 * s**2 - 2 * s) * m1
        if df == 0:
            break
        s_new = min(max(s - f / df, 0.0), 1.0)
        if abs(s_new - s) < 1e-15:
            s = s_new
            break
        s = s_new
    return s


def period_return_map(pot: Potential, energies, steps: int = 4096,
                      guess: Sequence[float] | None = None, richardson: bool = True):
    """Periods measured by integrating ``x'' = -g(x)`` from ``(x+(E), 0)``.

    The step is ``T_guess / steps`` (``T_guess`` from quadrature unless given);
    with ``richardson`` the runs at ``dt`` and ``dt/2`` are combined as
    ``(4 T(dt/2) - T(dt)) / 3``, cancelling the leading ``dt**2`` error of the
    symmetric scheme.
    """
    E = np.atleast_1d(np.asarray(energies, dtype=float))
    if guess is None:
        guess = [period_quadrature(pot, e) for e in E]
    T0 = np.asarray(guess, dtype=float)
    _, xp = pot.turning_points(E)
    xp = np.atleast_1d(xp)
    g = pot.g

    def accel(x):
        return -np.asarray(g(x), dtype=float)

    dt = T0 / steps
    coarse = _return_times(accel, xp, dt, int(1.5 * steps))
    if not richardson:
        return coarse
    fine = _return_times(accel, xp, dt / 2, int(3 * steps))
    return (4.0 * fine - coarse) / 3.0


def _checked_return_map(pot: Potential, E: np.ndarray, T: np.ndarray, tol: float,
                        steps: int = 4096, max_steps: int = 65536) -> np.ndarray:
    """Return-map periods, with the step refined 4x (up to ``max_steps`` per
    period) at energies where they disagree with ``T`` by more than ``tol``.
    Forces that are steep near a wall need the smaller step."""
    Tr = np.asarray(period_return_map(pot, E, steps=steps, guess=T), dtype=float)
    while steps < max_steps:
        redo = ~(np.abs(Tr - T) <= tol)
        if not redo.any():
            break
        steps *= 4
        Tr[redo] = period_return_map(pot, E[redo], steps=steps, guess=T[redo])
    return Tr


def period(pot: Potential, E: float, cross_check: bool = False, tol: float = 1e-6) -> float:
    """Quadrature period at energy ``E``; with ``cross_check`` the return-map
    estimate must agree within ``tol`` or ``ArithmeticError`` is raised."""
    emax = pot.energy_max()
    if not 0 < E < emax:
        raise EnergyError(f"E={E!r} is outside (0, {emax!r})")
    T = period_quadrature(pot, E)
    if cross_check:
        Tr = float(_checked_return_map(pot, np.array([E]), np.array([T]), tol)[0])
        if not abs(Tr - T) <= tol:
            raise ArithmeticError(f"period estimators disagree: {T!r} vs {Tr!r}")
    return T


@dataclass(frozen=True)
class PeriodReport:
    energies: tuple
    periods: tuple
    target: float
    max_deviation: float
    return_map_periods: tuple = ()
    max_estimator_gap: float = math.nan
    tol: float = 1e-6
    passed: bool = False

    def to_json(self) -> dict:
        return {
            "energies": list(self.energies),
            "periods": list(self.periods),
            "return_map_periods": list(self.return_map_periods),
            "target": self.target,
            "max_deviation": self.max_deviation,
            "max_estimator_gap": self.max_estimator_gap,
            "tol": self.tol,
            "passed": self.passed,
        }


def energy_grid(pot: Potential, n: int = 5, lo_frac: float = 1e-3, hi_frac: float = 0.9,
                cap: float | None = None) -> np.ndarray:
    """Geometric energies from ``lo_frac * E_max`` to ``hi_frac * E_max``.

    When ``V`` is unbounded on both sides ``E_max`` is replaced by ``cap``
    (default ``omega**2``, or 1 for degenerate wells).
    """
    emax = pot.energy_max()
    if not math.isfinite(emax):
        emax = cap if cap is not None else (pot.omega**2 if pot.omega else 1.0)
    return np.geomspace(lo_frac * emax, hi_frac * emax, n)


def verify_isochrony(pot: Potential, energies=None, tol: float = 1e-6,
                     return_map: bool = True, parallel: bool = False) -> PeriodReport:
    """Compare ``T(E)`` with ``2 pi / omega`` over ``energies``; passes iff the
    largest deviation is within ``tol`` (and, when the return map runs, the
    two estimators agree within ``tol``)."""
    E = energy_grid(pot) if energies is None else np.asarray(energies, dtype=float)
    emax = pot.energy_max()
    if np.any((E <= 0) | (E >= emax)):
        raise EnergyError(f"energies must lie in (0, {emax!r})")
    if parallel:
        with ThreadPoolExecutor() as ex:
            T = list(ex.map(lambda e: period_quadrature(pot, e), E))
    else:
        T = [period_quadrature(pot, e) for e in E]
    T = np.asarray(T)
    target = pot.target_period
    dev = float(np.max(np.abs(T - target))) if math.isfinite(target) else math.inf
    Tr, gap = (), math.nan
    ok = dev <= tol
    if return_map:
        Tr = _checked_return_map(pot, E, T, tol)
        gap = float(np.max(np.abs(Tr - T)))
        ok = ok and gap <= tol
        Tr = tuple(float(t) for t in Tr)
    return PeriodReport(tuple(float(e) for e in E), tuple(float(t) for t in T), target, dev,
                        Tr, gap, tol, bool(ok))


# ---------------------------------------------------------------------------
# Derivative conditions at the center
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class NecessaryConditions:
    """Residuals of the fourth and sixth order conditions at the origin.

    ``r4``/``r6`` are raw; ``r4_rel``/``r6_rel`` divide by the largest term
    entering each residual (and by ``V''(0)``, so a residual made of
    vanishing terms stays 0).
    """

    derivatives: tuple
    r4: float
    r6: float
    r4_rel: float
    r6_rel: float
    analytic: bool

    def passed(self, tol: float = 1e-3) -> bool:
        return self.r4_rel <= tol and self.r6_rel <= tol

    def to_json(self) -> dict:
        return {"derivatives": list(self.derivatives), "r4": self.r4, "r6": self.r6,
                "r4_rel": self.r4_rel, "r6_rel": self.r6_rel, "analytic": self.analytic}


def necessary_conditions(pot: Potential, fd_step: float | None = None,
                         stencil: int = 5) -> NecessaryConditions:
    """``r4 = V4 - 5 V3**2 / (3 V2)`` and
    ``r6 = V6 - 7 V3 V5 / V2 + 140 V3**4 / (9 V2**3)`` at 0.

    Analytic derivatives are used when all of orders 2..6 are supplied,
    otherwise ``(2*stencil+1)``-point central differences with step
    ``fd_step`` (default ``1e-2`` of the distance to the nearest end of
    ``J``, at most ``1e-2``), Richardson-extrapolated once.
    """
    analytic = all(n in pot.derivatives for n in range(2, 7))
    if analytic:
        d = [float(pot.derivatives[n](np.asarray(0.0))) for n in range(2, 7)]
    else:
        if fd_step is None:
            fd_step = 1e-2 * min(-pot.J.lo, pot.J.hi, 1.0)
        if (2 * stencil) * fd_step >= min(-pot.J.lo, pot.J.hi):
            raise DomainError("finite-difference stencil leaves J; reduce fd_step")
        d = [derivative_at(pot.V, 0.0, n, fd_step, m=stencil) for n in range(2, 7)]
    v2, v3, v4, v5, v6 = d
    if not v2 > 0:
        raise WellError(f"V''(0) = {v2!r} is not positive; the origin is not a center")
    t4 = 5 * v3**2 / (3 * v2)
    t6a = 7 * v3 * v5 / v2
    t6b = 140 * v3**4 / (9 * v2**3)
    r4 = v4 - t4
    r6 = v6 - t6a + t6b
    r4_rel = abs(r4) / max(abs(v4), abs(t4), v2)
    r6_rel = abs(r6) / max(abs(v6), abs(t6a), abs(t6b), v2)
    return NecessaryConditions(tuple(d), r4, r6, r4_rel, r6_rel, analytic)


# ---------------------------------------------------------------------------
# Presets and oracles
# ---------------------------------------------------------------------------


def quartic_period(E: float) -> float:
    """Exact period of ``x'' = -x**3`` (``V = x**4 / 4``) at energy ``E``."""
    xp = (4.0 * E) ** 0.25
    return 4.0 * xp / math.sqrt(2.0 * E) * beta_fn(0.25, 0.5) / 4.0


def potential_preset(name: str, omega: float = 1.0, a: float = 1.0) -> Potential:
    """Named potentials: ``harmonic`` (``omega**2 x**2 / 2``), ``quartic``
    (``x**4 / 4``, degenerate), ``stiff`` (``x**2/2 + x**4``), ``soft``
    (``x**2/2 + x**4/4``, from the force ``1 + x**2``) and ``rational``
    (built from ``rational(a)``)."""
    w2 = omega * omega
    zero = lambda x: np.zeros_like(x)  # noqa: E731
    if name == "harmonic":
        return potential_from_function(
            lambda x: 0.5 * w2 * x**2, g=lambda x: w2 * x, omega=omega,
            derivatives={2: lambda x: w2 + 0 * x, 3: zero, 4: zero, 5: zero, 6: zero},
            name="harmonic")
    if name == "quartic":
        return potential_from_function(
            lambda x: 0.25 * x**4, g=lambda x: x**3, omega=None, center=False,
            derivatives={2: lambda x: 3 * x**2, 3: lambda x: 6 * x, 4: lambda x: 24 + 0 * x,
                         5: zero, 6: zero},
            name="quartic")
    if name == "stiff":
        return potential_from_function(
            lambda x: 0.5 * x**2 + x**4, g=lambda x: x + 4 * x**3, omega=1.0,
            derivatives={2: lambda x: 1 + 12 * x**2, 3: lambda x: 24 * x,
                         4: lambda x: 24 + 0 * x, 5: zero, 6: zero},
            name="stiff")
    if name == "soft":
        return potential_from_function(
            lambda x: 0.5 * x**2 + 0.25 * x**4, g=lambda x: x + x**3, omega=1.0,
            derivatives={2: lambda x: 1 + 3 * x**2, 3: lambda x: 6 * x,
                         4: lambda x: 6 + 0 * x, 5: zero, 6: zero},
            name="soft")
    if name == "rational":
        return potential_from_involution(catalog("rational", (a,)), omega)
    raise KeyError(f"unknown potential preset {name!r}")


POTENTIAL_PRESETS = ("harmonic", "quartic", "stiff", "soft", "rational")

__all__ = [
    "EnergyError", "WellError", "Potential", "recover_omega", "potential_from_function",
    "potential_from_involution", "involution_from_potential", "period_quadrature",
    "period_return_map", "period", "PeriodReport", "energy_grid", "verify_isochrony",
    "NecessaryConditions", "necessary_conditions", "quartic_period", "potential_preset",
    "POTENTIAL_PRESETS",
]
