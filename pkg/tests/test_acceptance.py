"""One test per acceptance criterion, each against its own oracle.

Every test records a ``PASS``/``FAIL`` line (printed in the terminal summary)
before asserting, so a failing criterion is still reported with its numbers.
"""
import math
import time

import numpy as np

from involutions import centralforce as cf
from involutions import construct as cs
from involutions import fde
from involutions import isochrony as iso
from involutions.core import Interval, catalog, verify_involution

SEED = 20240601
ALL_CATALOG = [("negation", ()), ("piecewise_linear", (0.5,)), ("piecewise_linear", (2.0,)),
               ("piecewise_linear", (3.0,)), ("log_exp", ()), ("rational", (1.0,)),
               ("rational", (2.0,)), ("rational", (-1.0,)), ("rational", (-0.5,)),
               ("cube_root", (2.0,)), ("cube_root", (5.0,)), ("cube_root", (2.0, 1.0)),
               ("parabolic", ())]
EVEN_PRESETS = ["zero", "y2_over_8", "y6", "abs_lambda", "log_cosh"]


def test_criterion_1_parabolic(acceptance):
    t0 = time.perf_counter()
    r = cs.from_even_function(cs.even_preset("y2_over_8"))
    dt = time.perf_counter() - t0
    x = np.linspace(-1, 3, 502)[1:-1]
    err = float(np.max(np.abs(r.h(x) - (x + 4 - 4 * np.sqrt(1 + x)))))
    ok = (r.I.lo, r.I.hi) == (-4.0, 4.0) and abs(r.J.lo + 1) <= 1e-12 \
        and abs(r.J.hi - 3) <= 1e-12 and err <= 1e-8 and dt < 1.0
    assert acceptance(1, ok, f"I={r.I}, J={r.J}, max err {err:.2e} on 500 points, {dt:.3f}s")


def test_criterion_2_sextic_interval(acceptance):
    r = cs.from_even_function(cs.even_preset("y6"))
    root = 6.0 ** 0.2
    e = max(abs(r.J.lo + 5 / (12 * root)), abs(r.J.hi - 7 / (12 * root)))
    assert acceptance(2, e <= 1e-10, f"J={r.J}, endpoint error {e:.2e}")


def test_criterion_3_recovered_even(acceptance):
    errs = {}
    for lam in (0.5, 2.0, 3.0):
        P = cs.even_from_involution(catalog("piecewise_linear", (lam,)))
        y = P.I.sample(500)
        errs[f"lambda={lam:g}"] = float(np.max(np.abs(P.P(y) - (1 - lam) / (1 + lam) * np.abs(y))))
    P = cs.even_from_involution(catalog("log_exp"))
    y = P.I.sample(500)
    # -2 ln cosh(y/2) = -|y| - 2 ln(1 + e^-|y|) + 2 ln 2, overflow free
    oracle = np.array([-abs(v) - 2 * math.log1p(math.exp(-abs(v))) + 2 * math.log(2) for v in y])
    errs["log_exp"] = float(np.nanmax(np.abs(P.P(y) - oracle)))
    worst = max(errs.values())
    detail = ", ".join(f"{k} {v:.1e}" for k, v in errs.items())
    assert acceptance(3, worst <= 1e-8, detail)


def test_criterion_4_round_trips(acceptance):
    worst_a = worst_b = 0.0
    for name, params in ALL_CATALOG:
        inv = catalog(name, params)
        back = cs.from_even_function(cs.even_from_involution(inv), n_verify=0).h
        x = inv.J.sample(200)
        x = x[back.J.contains(x)]
        worst_a = max(worst_a, float(np.max(np.abs(back(x) - inv(x)))))
    for name in EVEN_PRESETS:
        P = cs.even_preset(name)
        r = cs.from_even_function(P, n_verify=0)
        Q = cs.even_from_involution(r.h)
        y = r.I.sample(200)
        worst_b = max(worst_b, float(np.nanmax(np.abs(Q.P(y) - P.P(y)))))
    ok = worst_a <= 1e-7 and worst_b <= 1e-7
    assert acceptance(4, ok, f"h -> P -> h {worst_a:.2e} over {len(ALL_CATALOG)} involutions, "
                             f"P -> h -> P {worst_b:.2e} over {len(EVEN_PRESETS)} presets")


def test_criterion_5_cubic_equation(acceptance):
    c = 2 ** (1 / 3) - 1
    eq = cs.SymmetricEquation(lambda x, y: (x + 1) ** 3 + (y + 1) ** 3 - 2, Interval(-1, c))
    h = cs.from_symmetric_equation(eq, np.linspace(-1, c, 2001)[1:-1])
    x, y = h.info["trace_x"], h.info["trace_y"]
    err = float(np.max(np.abs(y - (np.cbrt(2 - (x + 1) ** 3) - 1))))
    assert acceptance(5, err <= 1e-8, f"{x.size} table points, max err {err:.2e}")


def test_criterion_6_isochrony(acceptance):
    t0 = time.perf_counter()
    dev = gap = 0.0
    ok = True
    for name, params in [("negation", ()), ("rational", (1.0,)), ("rational", (-1.0,)),
                         ("rational", (2.0,)), ("parabolic", ()), ("log_exp", ())]:
        for w in (1.0, 2.0):
            pot = iso.potential_from_involution(catalog(name, params), w)
            rep = iso.verify_isochrony(pot, tol=1e-6)
            T = np.array(rep.periods)
            ok &= len(T) == 5 and rep.passed
            dev = max(dev, float(np.max(np.abs(T - 2 * math.pi / w))))
            gap = max(gap, rep.max_estimator_gap)
    ctrl = iso.verify_isochrony(iso.potential_preset("stiff"), tol=1e-6)
    dt = time.perf_counter() - t0
    ok = ok and dev <= 1e-6 and gap <= 1e-6 and not ctrl.passed and dt < 30
    assert acceptance(6, ok, f"max |T-2pi/w| {dev:.1e}, estimator gap {gap:.1e}, control "
                             f"{'fails' if not ctrl.passed else 'PASSES'} "
                             f"(dev {ctrl.max_deviation:.2f}), {dt:.1f}s")


def test_criterion_7_necessary_conditions(acceptance):
    worst = 0.0
    for name, params in [e for e in ALL_CATALOG if catalog(*e).smooth]:
        for w in (1.0, 2.0):
            nc = iso.necessary_conditions(iso.potential_from_involution(catalog(name, params), w))
            worst = max(worst, nc.r4_rel, nc.r6_rel)
    stiff = iso.necessary_conditions(iso.potential_preset("stiff"))
    ok = worst <= 1e-3 and stiff.analytic and abs(stiff.r4 - 24) <= 1e-6
    assert acceptance(7, ok, f"max relative residual {worst:.2e}; stiff r4={stiff.r4:g} "
                             f"({'analytic' if stiff.analytic else 'differences'})")


def test_criterion_8_central_force(acceptance):
    one = cf.stability_condition(cf.force_preset("constant"))
    rat = cf.force_preset("rational", a=1.0)
    rs = cf.stability_condition(rat)
    # oracle for the rational case: V = 2x^2/(2+x)^2 and h = -x/(1+x) in closed form
    x = np.linspace(-0.95, 10, 120)
    x = x[x != 0]
    rho = 1 / (2 * x**2 / (2 + x) ** 2) - 0.5 * (1 / x + (1 + x) / x) ** 2
    oracle = float(np.max(np.abs(rho * 2 * x**2 / (2 + x) ** 2)))
    quad = cf.force_preset("quadratic")
    rho1 = float(cf.stability_residual(quad, [1.0])[0])
    unstable = not cf.stability_condition(quad).stable
    full = cf.figure5_experiment()[-1]
    Ex = 0.5 * full.vx**2 + full.x**2 / 2 + full.x**4 / 4
    L = full.x * full.vy - full.y * full.vx
    dE, dL = float(np.max(np.abs(Ex - 0.0864))), float(np.max(np.abs(L - 0.2)))
    r = np.hypot(full.x, full.y)
    growth = (r[full.t <= 8].max() < r[full.t <= 14].max() <= r.max()) and \
        r[(full.t >= 14)].max() > r[full.t <= 8].max()
    ok = (one.stable and one.max_normalized <= 1e-8 and rs.stable and rs.max_normalized <= 1e-8
          and oracle <= 1e-8 and unstable and abs(abs(rho1) - 2 / 3) <= 1e-9
          and dE <= 1e-8 and dL <= 1e-8 and growth)
    assert acceptance(8, ok, f"rho f=1 {one.max_normalized:.1e}, rational {rs.max_normalized:.1e} "
                             f"(closed form {oracle:.1e}), rho(1)={rho1:.12f}, drift E {dE:.1e}, "
                             f"drift L {dL:.1e}, max r {r[full.t <= 8].max():.3f} -> {r.max():.3f}")


def _oracle(a, y0, t):
    """Closed forms coded from the regimes directly (power-law form below 1/2)."""
    s = np.sqrt(1 + t)
    u = np.log1p(t)
    if a == 0.5:
        return y0 * s
    if a == -0.5:
        return y0 * s * (1 - u)
    if abs(a) > 0.5:
        c = math.sqrt(4 * a * a - 1) / 2
        return y0 * s * (np.cos(c * u) + (2 * a - 1) / (2 * c) * np.sin(c * u))
    b = math.sqrt(1 - 4 * a * a)
    p1, p2 = (1 + b) / 2, (1 - b) / 2
    B = y0 * (p1 - a) / (p1 - p2)
    return (y0 - B) * (1 + t) ** p1 + B * (1 + t) ** p2


def test_criterion_9_fde(acceptance):
    err = res = 0.0
    for a in (2.0, 0.5, -0.5, 0.3, 0.0):
        sol = fde.solve_numeric(fde.FdeProblem(a, 1.0, Interval(0.0, 10.0)))
        m = (sol.t_grid >= 0) & (sol.t_grid <= 10)
        err = max(err, float(np.max(np.abs(sol.y[m] - _oracle(a, 1.0, sol.t_grid[m])))))
        res = max(res, fde.residual_check(sol))
    t = np.linspace(0, 10, 1001)
    cont = max(float(np.max(np.abs(fde.closed_form(0.5 + d, 1.0, t) - _oracle(0.5, 1.0, t))))
               for d in (1e-6, -1e-6))
    ok = err <= 1e-7 and res <= 1e-6 and cont <= 1e-4
    assert acceptance(9, ok, f"max err {err:.2e}, residual {res:.2e}, continuity {cont:.2e}")


def test_criterion_10_properties(acceptance):
    rng = np.random.default_rng(SEED)
    failures = []
    for name, params in ALL_CATALOG:
        inv = catalog(name, params)
        x = np.sort(inv.J.random_sample(200, rng))
        hx = inv(x)
        if not np.all(np.abs(inv(hx) - x) <= 1e-9 * (1 + np.abs(x))):
            failures.append(f"{name}{params} involutivity")
        if not np.all(np.diff(hx) < 0):
            failures.append(f"{name}{params} monotonicity")
        if abs(inv(0.0)) > 1e-15:  # cube_root(5) lands one ulp off
            failures.append(f"{name}{params} h(0)")
        if inv.smooth:
            s = 1e-6
            if abs((inv(s) - inv(-s)) / (2 * s) + 1) > 1e-6:
                failures.append(f"{name}{params} h'(0)")
        pot = iso.potential_from_involution(inv, 1.0 + rng.random())
        if not np.all(np.abs(pot.V(hx) - pot.V(x)) <= 1e-9 * (1 + pot.V(x))):
            failures.append(f"{name}{params} level symmetry")
    sys_ = cf.force_preset("quadratic")
    for _ in range(3):
        s0 = cf.State4(*rng.uniform(-0.5, 0.5, 4))
        tr = cf.simulate(sys_, s0, 20.0, 0.1)
        if tr.drift_L > 1e-8 * (1 + abs(tr.L[0])) or tr.drift_E > 1e-8 * (1 + abs(tr.E_x[0])):
            failures.append(f"conservation from {s0}")
    K = lambda y: 0.5 * (y + y**6)  # noqa: E731
    r6 = 6.0 ** -0.2
    grid = np.linspace(-r6, r6, 1_000_001)
    Kg = K(grid)
    q = rng.uniform(Kg[1], Kg[-2], 200)
    y = cs.invert_monotone(K, q, bracket=Interval(-r6, r6))
    j = np.searchsorted(Kg, q)
    if not np.all((grid[j - 1] <= y + 1e-12) & (y - 1e-12 <= grid[j])):
        failures.append("inversion oracle")
    rep_ok = all(verify_involution(catalog(n, p), n_samples=200).passed for n, p in ALL_CATALOG)
    if not rep_ok:
        failures.append("verify_involution")
    ok = not failures
    assert acceptance(10, ok, "all properties hold on seeded 200-point grids" if ok
                      else "; ".join(failures))
