"""The planar system x'' = -x f(x), y'' = -y f(x): its potential and level
involution, the stability identity at the origin, and orbit integration."""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np
from scipy import integrate

from .core import DomainError, Interval, Involution, RealFunction
from .isochrony import Potential, involution_from_potential, potential_from_function

FIGURE5_STATE = (0.4, 0.0, 0.0, 0.5)
FIGURE5_WINDOWS = ((0.0, 8.0), (0.0, 14.0), (0.0, 38.0))


class IntegrationError(RuntimeError):
    """The integrator stopped before the requested end time."""


def potential_by_quadrature(f: RealFunction, epsrel: float = 1e-12) -> Callable:
    """``V(x) = int_0^x s f(s) ds`` by adaptive quadrature, pointwise.

    Values whose error estimate exceeds ``100 * epsrel`` (near a singular end
    of the domain, typically) are returned as ``nan`` rather than trusted.
    """

    def one(x):
        if x == 0:
            return 0.0
        out = integrate.quad(lambda s: s * float(f.func(np.asarray(s))), 0.0, x, epsabs=0.0,
                             epsrel=epsrel, limit=200, full_output=1)
        val, err, ier = out[0], out[1], len(out) > 3
        if ier or not err <= 100 * epsrel * abs(val):
            return math.nan
        return val

    def V(x):
        xa = np.asarray(x, dtype=float)
        out = np.array([one(float(v)) for v in xa.ravel()]).reshape(xa.shape)
        return out

    return V


@dataclass(frozen=True)
class CentralForceSystem:
    """``f`` with ``f(0) = 1``, the potential ``V`` of the ``x`` equation and
    the involution pairing equal levels of ``V`` (built on first use)."""

    f: RealFunction
    V: RealFunction
    name: str = ""
    even: bool | None = None
    _cache: dict = field(default_factory=dict, compare=False, repr=False)

    @classmethod
    def from_force(cls, f: Callable, domain: Interval = Interval.real_line(),
                   V: Callable | None = None, name: str = "", normalize: bool = False,
                   even: bool | None = None) -> "CentralForceSystem":
        """Build from ``f``; ``V`` defaults to quadrature.  With ``normalize``
        the force is divided by ``f(0)`` (a time rescaling); otherwise
        ``f(0)`` must be 1."""
        F = RealFunction(f, domain, None, name or "f")
        f0 = F(0.0)
        if normalize:
            if not f0 > 0:
                raise ValueError(f"f(0) = {f0!r} must be positive")
            F = RealFunction(lambda x, c=f0: np.asarray(f(x)) / c, domain, None, F.name)
            if V is not None:
                V = (lambda x, V=V, c=f0: np.asarray(V(x)) / c)
        elif abs(f0 - 1.0) > 1e-12:
            raise ValueError(f"f(0) = {f0!r}; pass normalize=True to rescale to 1")
        g = lambda x, F=F: np.asarray(x) * F.func(x)  # noqa: E731
        Vf = RealFunction(V if V is not None else potential_by_quadrature(F), domain, g,
                          "V")
        sys = cls(F, Vf, name, even)
        if even:
            xs = domain.sample(101)
            xs = xs[domain.contains(-xs)]
            if np.max(np.abs(Vf(xs) - Vf(-xs)), initial=0.0) > 1e-10 * (1 + np.max(Vf(xs))):
                raise ValueError("f declared even but V is not")
        return sys

    @property
    def potential(self) -> Potential:
        if "pot" not in self._cache:
            V = self.V
            self._cache["pot"] = potential_from_function(
                V.func, V.domain, g=V.derivative, omega=1.0, name=f"V[{self.name}]")
        return self._cache["pot"]

    @property
    def h(self) -> Involution:
        if "h" not in self._cache:
            self._cache["h"] = involution_from_potential(self.potential, n_verify=0)
        return self._cache["h"]


def force_preset(name: str, a: float = 1.0, c: float = 1.0) -> CentralForceSystem:
    """``constant`` (``f = c``, normalized), ``quadratic`` (``1 + x**2``) and
    ``rational`` (``8 / (2 + a x)**3`` on ``x > -2/a``)."""
    if name == "constant":
        return CentralForceSystem.from_force(lambda x: c + 0 * np.asarray(x),
                                             V=lambda x: 0.5 * c * np.asarray(x) ** 2,
                                             name="constant", normalize=True, even=True)
    if name == "quadratic":
        return CentralForceSystem.from_force(lambda x: 1 + np.asarray(x) ** 2,
                                             V=lambda x: 0.5 * x**2 + 0.25 * x**4,
                                             name="quadratic", even=True)
    if name == "rational":
        if a == 0:
            return force_preset("constant")
        dom = Interval(-2.0 / a, math.inf) if a > 0 else Interval(-math.inf, -2.0 / a)
        return CentralForceSystem.from_force(lambda x: 8.0 / (2.0 + a * x) ** 3, dom,
                                             V=lambda x: 2.0 * x**2 / (2.0 + a * x) ** 2,
                                             name=f"rational(a={a:g})")
    raise KeyError(f"unknown force preset {name!r}")


FORCE_PRESETS = ("constant", "quadratic", "rational")


# ---------------------------------------------------------------------------
# Stability identity
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class StabilityReport:
    """``rho = 1/V - (1/x - 1/h)**2 / 2`` on the samples; ``normalized`` is
    ``rho * V`` (so ``1`` means the two sides are of unrelated size)."""

    samples: tuple
    rho: tuple
    normalized: tuple
    max_normalized: float
    region: Interval
    tol: float
    stable: bool

    @property
    def verdict(self) -> str:
        return "stable" if self.stable else "unstable"

    def to_json(self) -> dict:
        return {"verdict": self.verdict, "max_normalized": self.max_normalized,
                "tol": self.tol, "region": self.region.to_json(),
                "samples": list(self.samples), "rho": list(self.rho),
                "normalized": list(self.normalized)}


def stability_residual(sys: CentralForceSystem, x) -> np.ndarray:
    xa = np.asarray(x, dtype=float)
    if np.any(xa == 0):
        raise ValueError("samples must be nonzero")
    h = sys.h
    if not np.all(h.J.contains(xa)):
        raise DomainError(f"samples must lie in the well {h.J}")
    V = sys.V(xa)
    return 1.0 / V - 0.5 * (1.0 / xa - 1.0 / h(xa)) ** 2


def stability_condition(sys: CentralForceSystem, samples=None, n: int = 101,
                        tol: float = 1e-8) -> StabilityReport:
    """Test the stability identity on ``samples`` (default: ``n`` points of the
    well minus the origin).  Stable iff ``max |rho * V| <= tol``."""
    region = sys.h.J
    if samples is None:
        xs = region.sample(n)
        xs = xs[xs != 0]
    else:
        xs = np.asarray(samples, dtype=float)
    rho = stability_residual(sys, xs)
    norm = rho * sys.V(xs)
    mx = float(np.max(np.abs(norm)))
    return StabilityReport(tuple(map(float, xs)), tuple(map(float, rho)),
                           tuple(map(float, norm)), mx, region, tol, bool(mx <= tol))


# ---------------------------------------------------------------------------
# Orbits
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class State4:
    x: float
    vx: float
    y: float
    vy: float
    t: float = 0.0

    def as_array(self) -> np.ndarray:
        return np.array([self.x, self.vx, self.y, self.vy], dtype=float)


@dataclass(frozen=True)
class Trajectory:
    """Samples of ``(x, vx, y, vy)`` with the conserved quantities."""

    t: np.ndarray
    x: np.ndarray
    vx: np.ndarray
    y: np.ndarray
    vy: np.ndarray
    E_x: np.ndarray
    L: np.ndarray
    rtol: float = 1e-10
    error_estimate: float | None = None

    COLUMNS = ("t", "x", "vx", "y", "vy", "E_x", "L")

    @property
    def drift_E(self) -> float:
        return float(np.max(np.abs(self.E_x - self.E_x[0])))

    @property
    def drift_L(self) -> float:
        return float(np.max(np.abs(self.L - self.L[0])))

    @property
    def radius(self) -> np.ndarray:
        return np.hypot(self.x, self.y)

    def state(self, i: int) -> State4:
        return State4(self.x[i], self.vx[i], self.y[i], self.vy[i], self.t[i])

    def window(self, t0: float, t1: float) -> "Trajectory":
        m = (self.t >= t0 - 1e-12) & (self.t <= t1 + 1e-12)
        return Trajectory(self.t[m], self.x[m], self.vx[m], self.y[m], self.vy[m],
                          self.E_x[m], self.L[m], self.rtol, self.error_estimate)

    def max_radius(self, t0: float = -math.inf, t1: float = math.inf) -> float:
        m = (self.t >= t0) & (self.t <= t1)
        return float(np.max(self.radius[m]))

    def rows(self) -> np.ndarray:
        return np.column_stack([self.t, self.x, self.vx, self.y, self.vy, self.E_x, self.L])


def _integrate(sys: CentralForceSystem, s0: State4, t_eval: np.ndarray, rtol: float,
               atol: float):
    f = sys.f
    dom = f.domain

    def rhs(t, u):
        x, vx, y, vy = u
        fx = float(f.func(np.asarray(x)))
        return [vx, -x * fx, vy, -y * fx]

    def leave_lo(t, u):
        return u[0] - dom.lo

    def leave_hi(t, u):
        return dom.hi - u[0]

    leave_lo.terminal = leave_hi.terminal = True
    events = [e for e, end in ((leave_lo, dom.lo), (leave_hi, dom.hi)) if math.isfinite(end)]
    sol = integrate.solve_ivp(rhs, (s0.t, t_eval[-1]), s0.as_array(), method="DOP853",
                              t_eval=t_eval, rtol=rtol, atol=atol, events=events or None)
    if sol.status == 1:
        t_hit = [float(te[0]) for te in sol.t_events if len(te)]
        raise DomainError(f"x leaves the domain of f at t={min(t_hit)!r}")
    if sol.status != 0:
        raise IntegrationError(f"integration failed at t={sol.t[-1]!r}: {sol.message}")
    return sol.y


def simulate(sys: CentralForceSystem, s0: State4, t_end: float, dt: float,
             rtol: float = 1e-10, atol: float = 1e-12,
             estimate_error: bool = False) -> Trajectory:
    """Integrate with the DOP853 embedded pair and sample every ``dt``.

    With ``estimate_error`` the run is repeated at ``rtol / 100``; twice the
    largest state difference is reported as the error estimate, so it also
    covers the error of a run at any tolerance between the two.
    """
    if not dt > 0:
        raise ValueError("dt must be positive")
    if not t_end > s0.t:
        raise ValueError("t_end must exceed the initial time")
    n = int(math.floor((t_end - s0.t) / dt + 1e-9))
    t_eval = s0.t + dt * np.arange(n + 1)
    if t_eval[-1] < t_end - 1e-12:
        t_eval = np.append(t_eval, t_end)
    u = _integrate(sys, s0, t_eval, rtol, atol)
    err = None
    if estimate_error:
        ref = _integrate(sys, s0, t_eval, rtol / 100, atol / 100)
        err = 2.0 * float(np.max(np.abs(u - ref)))
    x, vx, y, vy = u
    E = 0.5 * vx**2 + sys.V(x)
    L = x * vy - y * vx
    return Trajectory(t_eval, x, vx, y, vy, E, L, rtol, err)


def figure5_experiment(dt: float = 0.01, rtol: float = 1e-10) -> tuple[Trajectory, ...]:
    """The ``f = 1 + x**2`` orbit from ``(0.4, 0, 0, 0.5)``, one integration to
    ``t = 38`` cut into the windows ``[0, 8]``, ``[0, 14]`` and ``[0, 38]``."""
    sys = force_preset("quadratic")
    full = simulate(sys, State4(*FIGURE5_STATE), FIGURE5_WINDOWS[-1][1], dt, rtol=rtol)
    return tuple(full.window(a, b) for a, b in FIGURE5_WINDOWS)


__all__ = [
    "FIGURE5_STATE", "FIGURE5_WINDOWS", "IntegrationError", "potential_by_quadrature",
    "CentralForceSystem", "force_preset", "FORCE_PRESETS", "StabilityReport",
    "stability_residual", "stability_condition", "State4", "Trajectory", "simulate",
    "figure5_experiment",
]
