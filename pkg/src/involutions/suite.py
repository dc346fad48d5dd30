"""Self-checks run by ``involutions suite``: every module against closed-form
values, one line per check."""
from __future__ import annotations

import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Callable

import numpy as np

from . import centralforce as cf
from . import construct as cs
from . import fde
from . import isochrony as iso
from .core import Interval, catalog, verify_involution

SEED = 20240601


@dataclass(frozen=True)
class CheckResult:
    name: str
    passed: bool
    detail: str
    seconds: float = 0.0

    def line(self) -> str:
        return f"{'PASS' if self.passed else 'FAIL'} {self.name}: {self.detail}"

    def to_json(self) -> dict:
        return {"name": self.name, "passed": self.passed, "detail": self.detail,
                "seconds": round(self.seconds, 3)}


SMOOTH_CATALOG = [("negation", ()), ("log_exp", ()), ("rational", (1.0,)), ("rational", (2.0,)),
                  ("rational", (-1.0,)), ("cube_root", (2.0, 1.0)), ("parabolic", ())]
FULL_CATALOG = SMOOTH_CATALOG + [("piecewise_linear", (2.0,)), ("cube_root", (2.0,))]


def check_parabolic_construction():
    t0 = time.perf_counter()
    r = cs.from_even_function(cs.even_preset("y2_over_8"))
    dt = time.perf_counter() - t0
    x = np.linspace(-1, 3, 502)[1:-1]
    err = float(np.max(np.abs(r.h(x) - (x + 4 - 4 * np.sqrt(1 + x)))))
    ok = (r.I.lo, r.I.hi) == (-4.0, 4.0) and abs(r.J.lo + 1) < 1e-12 \
        and abs(r.J.hi - 3) < 1e-12 and err <= 1e-8 and dt < 1.0
    return ok, f"I={r.I} J={r.J} max err {err:.2e} in {dt:.2f}s"


def check_sextic_interval():
    r = cs.from_even_function(cs.even_preset("y6"))
    s = 6.0 ** 0.2
    e = max(abs(r.J.lo + 5 / (12 * s)), abs(r.J.hi - 7 / (12 * s)))
    return e <= 1e-10, f"J={r.J} endpoint err {e:.2e}"


def check_recovered_even():
    worst = 0.0
    for lam in (0.5, 2.0, 3.0):
        P = cs.even_from_involution(catalog("piecewise_linear", (lam,)))
        y = np.linspace(-20, 20, 401)
        worst = max(worst, float(np.max(np.abs(P.P(y) - (1 - lam) / (1 + lam) * np.abs(y)))))
    P = cs.even_from_involution(catalog("log_exp"))
    y = np.linspace(-30, 30, 401)
    worst = max(worst, float(np.nanmax(np.abs(P.P(y) + 2 * np.log(np.cosh(y / 2))))))
    return worst <= 1e-8, f"max err {worst:.2e}"


def check_round_trips():
    worst = 0.0
    for name, params in FULL_CATALOG:
        inv = catalog(name, params)
        r = cs.from_even_function(cs.even_from_involution(inv), n_verify=0)
        x = inv.J.sample(200)
        x = x[r.J.contains(x)]
        worst = max(worst, float(np.max(np.abs(r.h(x) - inv(x)))))
    for name in ("zero", "y2_over_8", "y6", "abs_lambda", "log_cosh"):
        P = cs.even_preset(name)
        r = cs.from_even_function(P, n_verify=0)
        Q = cs.even_from_involution(r.h)
        y = r.I.sample(200)
        worst = max(worst, float(np.nanmax(np.abs(Q.P(y) - P.P(y)))))
    return worst <= 1e-7, f"max err {worst:.2e}"


def check_cubic_equation():
    eq = cs.equation_preset("cubic2")
    h = cs.from_symmetric_equation(eq, cs.default_grid(eq.omega))
    x, y = h.info["trace_x"], h.info["trace_y"]
    err = float(np.max(np.abs(y - (np.cbrt(2 - (x + 1) ** 3) - 1))))
    return err <= 1e-8, f"{x.size} table points, max err {err:.2e}"


def check_isochrony():
    t0 = time.perf_counter()
    dev = gap = 0.0
    ok = True
    for name, params in [("negation", ()), ("rational", (1.0,)), ("rational", (-1.0,)),
                         ("rational", (2.0,)), ("parabolic", ()), ("log_exp", ())]:
        for w in (1.0, 2.0):
            rep = iso.verify_isochrony(iso.potential_from_involution(catalog(name, params), w))
            ok &= rep.passed
            dev, gap = max(dev, rep.max_deviation), max(gap, rep.max_estimator_gap)
    ctrl = iso.verify_isochrony(iso.potential_preset("stiff"))
    ok = ok and not ctrl.passed and time.perf_counter() - t0 < 30
    return ok, (f"max |T-2pi/w| {dev:.2e}, estimator gap {gap:.2e}, control deviation "
                f"{ctrl.max_deviation:.3f}, {time.perf_counter() - t0:.1f}s")


def check_necessary_conditions():
    worst = 0.0
    for name, params in SMOOTH_CATALOG:
        nc = iso.necessary_conditions(iso.potential_from_involution(catalog(name, params)))
        worst = max(worst, nc.r4_rel, nc.r6_rel)
    r4 = iso.necessary_conditions(iso.potential_preset("stiff")).r4
    return worst <= 1e-3 and abs(r4 - 24) <= 1e-6, f"max relative residual {worst:.2e}, stiff r4={r4}"


def check_central_force():
    s1 = cf.stability_condition(cf.force_preset("constant"))
    s2 = cf.stability_condition(cf.force_preset("rational"))
    quad = cf.force_preset("quadratic")
    s3 = cf.stability_condition(quad)
    rho1 = float(cf.stability_residual(quad, [1.0])[0])
    w = cf.figure5_experiment()
    full = w[-1]
    growth = full.max_radius(14, 38) > full.max_radius(0, 8)
    ok = (s1.stable and s2.stable and not s3.stable and abs(abs(rho1) - 2 / 3) <= 1e-9
          and abs(full.L[0] - 0.2) < 1e-15 and abs(full.E_x[0] - 0.0864) < 1e-15
          and full.drift_L <= 1e-8 and full.drift_E <= 1e-8 and growth)
    return ok, (f"rho(1)={rho1:.12f}, drift L {full.drift_L:.1e}, drift E {full.drift_E:.1e}, "
                f"max r {w[0].max_radius():.3f} -> {full.max_radius(14, 38):.3f}")


def check_fde():
    err = res = 0.0
    for a, y0, lo in [(2.0, 1.0, 0.0), (0.5, 1.0, 0.0), (-0.5, 1.0, 0.0), (0.3, 2.0, -0.9),
                      (0.0, 1.0, 0.0)]:
        sol = fde.solve_numeric(fde.FdeProblem(a, y0, Interval(lo, 10.0)))
        err = max(err, fde.max_error(sol))
        res = max(res, fde.residual_check(sol))
    t = np.linspace(0, 10, 101)
    cont = max(float(np.max(np.abs(fde.closed_form(0.5 + d, 1.0, t) - fde.closed_form(0.5, 1.0, t))))
               for d in (1e-6, -1e-6))
    return err <= 1e-7 and res <= 1e-6 and cont <= 1e-4, \
        f"max err {err:.2e}, residual {res:.2e}, continuity {cont:.2e}"


def check_properties():
    rng = np.random.default_rng(SEED)
    worst = 0.0
    ok = True
    for name, params in FULL_CATALOG:
        inv = catalog(name, params)
        x = np.sort(inv.J.random_sample(200, rng))
        rep = verify_involution(inv, points=x)
        ok &= rep.passed
        worst = max(worst, rep.max_involution_residual)
        if inv.smooth:
            ok &= abs(inv.deriv(0.0) + 1) <= 1e-6
            pot = iso.potential_from_involution(inv)
            ok &= bool(np.all(np.abs(pot.V(inv(x)) - pot.V(x)) <= 1e-9 * (1 + pot.V(x))))
    K = lambda y: 0.5 * (y + y**6)  # noqa: E731
    grid = np.linspace(-0.5, 0.5, 100_001)
    q = rng.uniform(K(-0.5), K(0.5), 200)
    y = cs.invert_monotone(K, q, bracket=Interval(-6**-0.2, 6**-0.2))
    j = np.searchsorted(K(grid), q)
    ok &= bool(np.all((grid[j - 1] <= y) & (y <= grid[j])))
    return bool(ok), f"max involution residual {worst:.2e}"


CHECKS: list[tuple[str, Callable]] = [
    ("construct: P=y^2/8 gives the parabolic involution", check_parabolic_construction),
    ("construct: P=y^6 interval endpoints", check_sextic_interval),
    ("construct: recovered even functions", check_recovered_even),
    ("construct: round trips", check_round_trips),
    ("construct: cubic symmetric equation", check_cubic_equation),
    ("isochrony: periods", check_isochrony),
    ("isochrony: derivative conditions", check_necessary_conditions),
    ("centralforce: stability and orbit", check_central_force),
    ("fde: closed forms and residuals", check_fde),
    ("core: sampled properties", check_properties),
]


def _run(item) -> CheckResult:
    name, fn = item
    t0 = time.perf_counter()
    try:
        ok, detail = fn()
    except Exception as exc:  # a crash is a failed check, reported as such
        ok, detail = False, f"{type(exc).__name__}: {exc}"
    return CheckResult(name, bool(ok), detail, time.perf_counter() - t0)


def run_suite(parallel: bool = False) -> list[CheckResult]:
    if parallel:
        with ThreadPoolExecutor() as ex:
            return list(ex.map(_run, CHECKS))
    return [_run(c) for c in CHECKS]
