"""Intervals, real functions and involutions.

An involution here is a continuous map ``h`` of an open interval ``J`` onto
itself with ``h(h(x)) = x``, ``0 in J``, ``h(0) = 0`` and ``h != id``.  Such a
map is necessarily strictly decreasing with a single fixed point.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from typing import Any, Callable, Mapping, Sequence

import numpy as np

EPS = np.finfo(float).eps
FD_STEP = EPS ** (1.0 / 3.0)

DEFAULT_ATOL = 1e-9
DEFAULT_RTOL = 1e-9


class DomainError(ValueError):
    """A function was evaluated outside its declared domain."""


class NotAnInvolutionError(ValueError):
    """The input fails an involution axiom badly enough that we cannot go on."""


class BracketError(ValueError):
    """No sign change could be located."""


# ---------------------------------------------------------------------------
# Interval
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Interval:
    """Open interval ``(lo, hi)``; either end may be infinite."""

    lo: float
    hi: float

    def __post_init__(self):
        lo, hi = float(self.lo), float(self.hi)
        if math.isnan(lo) or math.isnan(hi) or not lo < hi:
            raise ValueError(f"empty interval ({self.lo}, {self.hi})")
        object.__setattr__(self, "lo", lo)
        object.__setattr__(self, "hi", hi)

    @classmethod
    def real_line(cls) -> "Interval":
        return cls(-math.inf, math.inf)

    @classmethod
    def symmetric_around_zero(cls, r: float) -> "Interval":
        return cls(-r, r)

    @property
    def bounded(self) -> bool:
        return math.isfinite(self.lo) and math.isfinite(self.hi)

    @property
    def symmetric(self) -> bool:
        return self.lo == -self.hi

    @property
    def width(self) -> float:
        return self.hi - self.lo

    def contains(self, x):
        x = np.asarray(x, dtype=float)
        out = (self.lo < x) & (x < self.hi)
        return bool(out) if out.ndim == 0 else out

    def midpoint(self) -> float:
        """Interior reference point: the midpoint, or a point one unit in from
        the finite end of a half-line."""
        if self.bounded:
            return 0.5 * (self.lo + self.hi)
        if math.isinf(self.lo) and math.isinf(self.hi):
            return 0.0
        if math.isfinite(self.lo):
            return self.lo + max(1.0, abs(self.lo))
        return self.hi - max(1.0, abs(self.hi))

    def anchor(self) -> float:
        """Point the sampling grids radiate from: 0 when inside, else the midpoint."""
        return 0.0 if self.contains(0.0) else self.midpoint()

    def shift(self, c: float) -> "Interval":
        return Interval(self.lo + c, self.hi + c)

    def scale(self, a: float) -> "Interval":
        if a == 0:
            raise ValueError("scale factor must be nonzero")
        lo, hi = self.lo / a, self.hi / a
        return Interval(min(lo, hi), max(lo, hi))

    def intersect(self, other: "Interval") -> "Interval":
        return Interval(max(self.lo, other.lo), min(self.hi, other.hi))

    def from_unit(self, u, gap: float = 1e-3, reach: float = 8.0):
        """Map ``u`` in [-1, 1] to interior points.

        ``u < 0`` lands left of the anchor, ``u > 0`` right of it.  Toward a
        finite end the offsets cluster geometrically and stop ``gap`` (relative
        to the side length) short of it; toward an infinite end they grow
        geometrically out to ``reach``.
        """
        u = np.asarray(u, dtype=float)
        c = self.anchor()
        t = np.abs(u)
        out = np.full(u.shape, c)
        for sign, end in ((-1.0, self.lo), (1.0, self.hi)):
            mask = np.sign(u) == sign
            if not np.any(mask):
                continue
            tm = t[mask]
            if math.isfinite(end):
                d = abs(end - c)
                off = d * (1.0 - gap**tm)
            else:
                off = reach * (2.0 ** (10.0 * tm) - 1.0) / 1023.0
            out[mask] = c + sign * off
        return out

    def sample(self, n: int, gap: float = 1e-3, reach: float = 8.0) -> np.ndarray:
        """``n`` ascending interior points, anchor included (for odd ``n``)."""
        if n < 1:
            raise ValueError("need at least one sample")
        return np.unique(self.from_unit(np.linspace(-1.0, 1.0, n), gap, reach))

    def random_sample(self, n: int, rng: np.random.Generator, gap: float = 1e-3,
                      reach: float = 8.0) -> np.ndarray:
        return np.sort(self.from_unit(rng.uniform(-1.0, 1.0, n), gap, reach))

    def ladder(self) -> np.ndarray:
        """Ascending interior points reaching as close to both ends as
        floating point allows (used for bracketing)."""
        c = self.midpoint()
        pts = [c]
        for sign, end in ((-1.0, self.lo), (1.0, self.hi)):
            near = abs(end - c) if math.isfinite(end) else 1.0
            # every binary scale below the half-width, so roots near c stay tight
            steps = near * 2.0 ** -np.arange(1.0, 1075.0)
            pts.extend(c + sign * steps[steps > 0])
            if math.isfinite(end):
                d = end - c
                for j in range(1, 1100):
                    p = end - d * 2.0**-j
                    if p == end or p == pts[-1]:
                        break
                    pts.append(p)
            else:
                for j in range(-4, 1021):
                    pts.append(c + sign * 2.0**j)
        return np.unique(np.asarray(pts))

    def to_json(self) -> list:
        return [_json_float(self.lo), _json_float(self.hi)]

    def __str__(self):
        return f"({self.lo:g}, {self.hi:g})"


def _json_float(v: float):
    if math.isinf(v):
        return "inf" if v > 0 else "-inf"
    return float(v)


# ---------------------------------------------------------------------------
# RealFunction
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class RealFunction:
    """A vectorized real map with a declared open domain.

    Evaluating outside the domain raises :class:`DomainError`.  ``derivative``
    is an analytic derivative when known; :meth:`deriv` falls back to a
    centered difference otherwise.
    """

    func: Callable[[np.ndarray], Any]
    domain: Interval
    derivative: Callable[[np.ndarray], Any] | None = None
    name: str = ""

    def _check(self, x: np.ndarray):
        bad = ~((self.domain.lo < x) & (x < self.domain.hi))
        if np.any(bad):
            first = x[bad].flat[0] if x.ndim else float(x)
            raise DomainError(
                f"{self.name or 'function'} evaluated at {first!r}, outside {self.domain}")

    def __call__(self, x):
        xa = np.asarray(x, dtype=float)
        self._check(xa)
        with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
            out = np.asarray(self.func(xa), dtype=float)
        if out.shape != xa.shape:
            out = np.broadcast_to(out, xa.shape).copy()
        return float(out) if xa.ndim == 0 else out

    @property
    def has_derivative(self) -> bool:
        return self.derivative is not None

    def deriv(self, x):
        xa = np.asarray(x, dtype=float)
        self._check(xa)
        if self.derivative is not None:
            with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
                out = np.asarray(self.derivative(xa), dtype=float)
            if out.shape != xa.shape:
                out = np.broadcast_to(out, xa.shape).copy()
        else:
            out = central_difference(self, xa)
        return float(out) if xa.ndim == 0 else out


def central_difference(f: RealFunction, x: np.ndarray) -> np.ndarray:
    """Centered difference with step ``cbrt(eps) * (1 + |x|)``, shrunk so the
    stencil stays inside the domain."""
    x = np.asarray(x, dtype=float)
    step = FD_STEP * (1.0 + np.abs(x))
    dist = np.minimum(x - f.domain.lo, f.domain.hi - x)
    step = np.minimum(step, 0.5 * dist)
    return (f(x + step) - f(x - step)) / (2.0 * step)


# ---------------------------------------------------------------------------
# Involution
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Involution:
    """A map ``h`` of ``J`` onto itself packaged with its metadata.

    ``kinks`` lists points where ``h`` is not differentiable; for smooth
    entries it is empty and ``h.derivative`` (or a finite difference) is
    meaningful everywhere.
    """

    h: RealFunction
    name: str = ""
    params: tuple = ()
    fixed_point: float = 0.0
    smooth: bool = True
    kinks: tuple = ()
    info: Mapping[str, Any] = field(default_factory=dict, compare=False, repr=False)

    @property
    def J(self) -> Interval:
        return self.h.domain

    def __call__(self, x):
        return self.h(x)

    def deriv(self, x):
        if not self.smooth:
            raise ValueError(f"{self.name} is not differentiable everywhere (kinks at {self.kinks})")
        return self.h.deriv(x)

    def to_json(self) -> dict:
        return {
            "name": self.name,
            "params": [float(p) for p in self.params],
            "J": self.J.to_json(),
            "fixed_point": float(self.fixed_point),
            "smooth": self.smooth,
            "kinks": [float(k) for k in self.kinks],
        }


@dataclass(frozen=True)
class VerificationReport:
    max_involution_residual: float
    monotonicity_ok: bool
    origin_residual: float
    samples_used: int
    maps_into_J: bool = True
    passed: bool = False

    def to_json(self) -> dict:
        return {
            "max_involution_residual": self.max_involution_residual,
            "monotonicity_ok": self.monotonicity_ok,
            "origin_residual": self.origin_residual,
            "samples_used": self.samples_used,
            "maps_into_J": self.maps_into_J,
            "passed": self.passed,
        }


def _as_function(h) -> RealFunction:
    if isinstance(h, Involution):
        return h.h
    if isinstance(h, RealFunction):
        return h
    raise TypeError(f"expected RealFunction or Involution, got {type(h).__name__}")


def verify_involution(h, J: Interval | None = None, n_samples: int = 100,
                      atol: float = DEFAULT_ATOL, rtol: float = DEFAULT_RTOL,
                      points: Sequence[float] | None = None,
                      require_origin: bool = True) -> VerificationReport:
    """Check ``h(h(x)) = x``, strict decrease and ``h(0) = 0`` on samples of ``J``.

    Samples come from :meth:`Interval.sample` unless explicit ``points`` are
    given.  A sample whose image leaves ``J`` raises
    :class:`NotAnInvolutionError`; a sample outside ``h``'s own domain raises
    :class:`DomainError`.
    """
    f = _as_function(h)
    J = f.domain if J is None else J
    if points is None:
        if n_samples < 3:
            raise ValueError("n_samples must be at least 3")
        xs = J.sample(n_samples)
    else:
        xs = np.sort(np.asarray(points, dtype=float))
    if not np.all(J.contains(xs)):
        raise DomainError("verification points must lie strictly inside J")
    hx = f(xs)
    inside = J.contains(hx)
    if not np.all(inside):
        bad = xs[~inside][0]
        raise NotAnInvolutionError(f"h({bad!r}) = {f(bad)!r} is not in J = {J}")
    hhx = f(hx)
    resid = np.abs(hhx - xs)
    ok_resid = bool(np.all(resid <= atol + rtol * np.abs(xs)))
    mono = bool(np.all(np.diff(hx) < 0)) if xs.size > 1 else True
    if J.contains(0.0):
        origin = abs(f(0.0))
    else:
        origin = math.nan
    ok_origin = (not require_origin) or (origin <= atol)
    return VerificationReport(
        max_involution_residual=float(resid.max()),
        monotonicity_ok=mono,
        origin_residual=float(origin),
        samples_used=int(xs.size),
        passed=ok_resid and mono and ok_origin,
    )


def _bisect_increasing(k: Callable[[float], float], a: float, b: float, tol: float,
                       maxiter: int = 400) -> float:
    fa = k(a)
    for _ in range(maxiter):
        m = 0.5 * (a + b)
        fm = k(m)
        if abs(fm) <= tol or m in (a, b):
            return m
        if (fm < 0) == (fa < 0):
            a, fa = m, fm
        else:
            b = m
    return 0.5 * (a + b)


def fixed_point(h, J: Interval | None = None, tol: float = 1e-14,
                max_expansion: float = 1e6) -> float:
    """Unique fixed point of a decreasing involution.

    ``k(x) = x - h(x)`` is strictly increasing.  For any start ``x1`` the pair
    ``(h(x1), x1)`` brackets its zero; when that fails (input is not an
    involution) the bracket is grown geometrically toward both ends, up to a
    ``max_expansion``-fold enlargement.
    """
    f = _as_function(h)
    J = f.domain if J is None else J

    def k(x):
        return x - f(x)

    x1 = J.midpoint()
    k1 = k(x1)
    if k1 == 0:
        return x1
    hx1 = f(x1)
    if J.contains(hx1) and hx1 != x1:
        a, b = sorted((hx1, x1))
        if k(a) <= 0 <= k(b):
            return _bisect_increasing(k, a, b, tol)

    # fallback search
    step = 1.0 if not J.bounded else 0.25 * J.width
    grown = 1.0
    a = b = x1
    while grown <= max_expansion:
        a = x1 - step * grown if x1 - step * grown > J.lo else 0.5 * (J.lo + a)
        b = x1 + step * grown if x1 + step * grown < J.hi else 0.5 * (J.hi + b)
        ka, kb = k(a), k(b)
        if ka <= 0 <= kb:
            return _bisect_increasing(k, a, b, tol)
        grown *= 2.0
    raise BracketError("no sign change of x - h(x) in J; input is not a decreasing involution")


# ---------------------------------------------------------------------------
# Normalization and homothety
# ---------------------------------------------------------------------------


def normalize(h, J: Interval | None = None, tol: float = 1e-14, name: str | None = None,
              params: tuple = ()) -> Involution:
    """Translate so the fixed point sits at the origin: ``x -> h(x + c) - c``."""
    f = _as_function(h)
    J = f.domain if J is None else J
    base = h if isinstance(h, Involution) else None
    c = fixed_point(f, J, tol)
    label = name if name is not None else (base.name if base else f.name)
    if base is not None:
        params = params or base.params
    if c == 0.0:
        if base is not None and base.fixed_point == 0.0:
            return base
        return Involution(h=f, name=label, params=params, fixed_point=0.0,
                          smooth=f.has_derivative)
    g = f.func
    dg = f.derivative
    func = lambda x: g(x + c) - c  # noqa: E731
    deriv = (lambda x: dg(x + c)) if dg is not None else None
    kinks = tuple(k - c for k in base.kinks) if base is not None else ()
    smooth = (base.smooth if base is not None else dg is not None)
    return Involution(
        h=RealFunction(func, J.shift(-c), deriv if smooth else None, f.name),
        name=label, params=params, fixed_point=0.0, smooth=smooth, kinks=kinks,
        info={"shift": c},
    )


def homothety(inv: Involution, a: float) -> Involution:
    """``x -> h(a x) / a``; maps ``(b, c)`` to ``(b/a, c/a)`` (endpoints swap for ``a < 0``)."""
    a = float(a)
    if a == 0.0 or not math.isfinite(a):
        raise ValueError("homothety factor must be a nonzero finite real")
    g = inv.h.func
    dg = inv.h.derivative
    func = lambda x: g(a * x) / a  # noqa: E731
    deriv = (lambda x: dg(a * x)) if dg is not None else None
    return Involution(
        h=RealFunction(func, inv.J.scale(a), deriv, inv.h.name),
        name=inv.name, params=inv.params, fixed_point=inv.fixed_point / a,
        smooth=inv.smooth, kinks=tuple(sorted(k / a for k in inv.kinks)),
        info={**inv.info, "homothety": inv.info.get("homothety", 1.0) * a},
    )


# ---------------------------------------------------------------------------
# Catalog
# ---------------------------------------------------------------------------

LN2 = math.log(2.0)


def _negation():
    return Involution(
        RealFunction(lambda x: -x, Interval.real_line(), lambda x: -np.ones_like(x), "negation"),
        name="negation")


def _piecewise_linear(lam: float):
    if not lam > 0:
        raise ValueError(f"piecewise_linear needs lambda > 0, got {lam}")

    def h(x):
        return np.where(x <= 0, -x / lam, -lam * x)

    smooth = lam == 1.0
    deriv = (lambda x: -np.ones_like(x)) if smooth else None
    return Involution(RealFunction(h, Interval.real_line(), deriv, "piecewise_linear"),
                      name="piecewise_linear", params=(lam,), smooth=smooth,
                      kinks=() if smooth else (0.0,))


def _log_exp():
    def h(x):
        return np.log(2.0 - np.exp(x))

    def dh(x):
        ex = np.exp(x)
        return -ex / (2.0 - ex)

    return Involution(RealFunction(h, Interval(-math.inf, LN2), dh, "log_exp"), name="log_exp")


def rational_domain(a: float) -> Interval:
    if a > 0:
        return Interval(-1.0 / a, math.inf)
    if a < 0:
        return Interval(-math.inf, -1.0 / a)
    return Interval.real_line()


def _rational(a: float):
    def h(x):
        return -x / (1.0 + a * x)

    def dh(x):
        return -1.0 / (1.0 + a * x) ** 2

    return Involution(RealFunction(h, rational_domain(a), dh, "rational"),
                      name="rational", params=(a,))


def _cube_root(a: float, restricted: bool = False):
    m = float(np.cbrt(a / 2.0))

    def h(x):
        return np.cbrt(a - (x + m) ** 3) - m

    def dh(x):
        return -((x + m) ** 2) / np.cbrt(a - (x + m) ** 3) ** 2

    if a == 0.0:
        return Involution(RealFunction(h, Interval.real_line(), dh, "cube_root"),
                          name="cube_root", params=(a,))
    kink = float(np.cbrt(a)) - m
    if restricted:
        lo, hi = sorted((kink, -m))
        return Involution(RealFunction(h, Interval(lo, hi), dh, "cube_root"),
                          name="cube_root", params=(a, 1.0))
    return Involution(RealFunction(h, Interval.real_line(), None, "cube_root"),
                      name="cube_root", params=(a,), smooth=False, kinks=(kink,))


def _parabolic():
    def h(x):
        return x + 4.0 - 4.0 * np.sqrt(1.0 + x)

    def dh(x):
        return 1.0 - 2.0 / np.sqrt(1.0 + x)

    return Involution(RealFunction(h, Interval(-1.0, 3.0), dh, "parabolic"), name="parabolic")


CATALOG_NAMES = ("negation", "piecewise_linear", "log_exp", "rational", "cube_root", "parabolic")


def catalog(name: str, params: Sequence[float] = ()) -> Involution:
    """Named involutions.

    ``piecewise_linear(lam)``, ``rational(a)`` and ``cube_root(a)`` take one
    parameter; ``cube_root(a, 1)`` is the smooth restriction between the
    point where ``h' = 0`` and the kink.
    """
    params = tuple(float(p) for p in params)

    def need(n_min, n_max=None):
        n_max = n_min if n_max is None else n_max
        if not n_min <= len(params) <= n_max:
            raise ValueError(f"{name} takes {n_min}..{n_max} parameters, got {len(params)}")

    if name == "negation":
        need(0)
        return _negation()
    if name == "piecewise_linear":
        need(1)
        return _piecewise_linear(params[0])
    if name == "log_exp":
        need(0)
        return _log_exp()
    if name == "rational":
        need(1)
        return _rational(params[0])
    if name == "cube_root":
        need(1, 2)
        return _cube_root(params[0], restricted=len(params) == 2 and params[1] != 0)
    if name == "parabolic":
        need(0)
        return _parabolic()
    raise ValueError(f"unknown catalog involution {name!r}; known: {', '.join(CATALOG_NAMES)}")


def with_name(inv: Involution, name: str) -> Involution:
    return replace(inv, name=name)
