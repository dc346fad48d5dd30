import math

import numpy as np
import pytest

from involutions.construct import (EvenFunction, MonotonicityError, MonotoneInverse,
                                   NotEvenError, SymmetricEquation, certified_interval,
                                   default_grid, displacement, equation_preset,
                                   even_from_involution, even_preset, from_even_function,
                                   from_symmetric_equation, invert_monotone, maximal_interval)
from involutions.core import (BracketError, Interval, NotAnInvolutionError, RealFunction,
                              catalog, verify_involution)

LINE = Interval.real_line()
R6 = 6.0 ** -0.2


def grid_oracle(K, x, lo, hi, n=1_000_001):
    """Dense lookup on n points, then plain bisection inside the located cell."""
    ys = np.linspace(lo, hi, n)
    j = int(np.searchsorted(K(ys), x))
    a, b = ys[j - 1], ys[j]
    for _ in range(200):
        m = 0.5 * (a + b)
        if m in (a, b):
            break
        if K(m) < x:
            a = m
        else:
            b = m
    return 0.5 * (a + b)


# -- invert_monotone -----------------------------------------------------------

def test_invert_quadratic_example():
    K = RealFunction(lambda y: y / 2 + y**2 / 16, Interval(-4, 4), lambda y: 0.5 + y / 8)
    assert invert_monotone(K, 0.21) == pytest.approx(0.4, abs=1e-15)


def test_invert_linear():
    assert invert_monotone(lambda y: y / 2, 1.0, bracket=LINE) == pytest.approx(2.0, abs=1e-15)


def test_invert_sextic_against_grid_oracle():
    K = lambda y: 0.5 * (y + y**6)  # noqa: E731
    y = invert_monotone(K, 0.3, bracket=Interval(-R6, R6))
    assert abs(y - grid_oracle(K, 0.3, -R6 * (1 - 1e-12), R6 * (1 - 1e-12))) <= 1e-10
    assert K(y) == pytest.approx(0.3, abs=1e-15)


def test_invert_random_queries_against_oracle():
    rng = np.random.default_rng(7)
    K = lambda y: np.sinh(y) + y  # noqa: E731
    q = rng.uniform(-20, 20, 100)
    y = invert_monotone(K, q, bracket=LINE)
    ys = np.linspace(-4, 4, 1_000_001)
    j = np.searchsorted(K(ys), q)
    assert np.all((ys[j - 1] <= y + 1e-10) & (y - 1e-10 <= ys[j]))
    assert np.max(np.abs(K(y) - q)) <= 1e-13 * 20


def test_invert_out_of_reach():
    K = RealFunction(lambda y: np.tanh(y), LINE, lambda y: 1 / np.cosh(y) ** 2)
    with pytest.raises(BracketError):
        invert_monotone(K, 2.0)
    assert math.isnan(invert_monotone(K, 2.0, strict=False))


def test_invert_detects_non_monotone():
    with pytest.raises(MonotonicityError):
        invert_monotone(lambda y: y**2, 0.5, bracket=Interval(-1, 1))


def test_invert_detects_negative_derivative():
    # sampled values rise, but the supplied derivative says otherwise
    K = RealFunction(lambda y: y, LINE, lambda y: -np.ones_like(y))
    with pytest.raises(MonotonicityError):
        invert_monotone(K, 0.123456)


def test_monotone_inverse_reused():
    inv = MonotoneInverse(RealFunction(np.exp, LINE, np.exp))
    assert inv(math.e) == pytest.approx(1.0, abs=1e-15)
    assert np.allclose(inv(np.array([1.0, 2.0])), [0.0, math.log(2)], atol=1e-15)
    lo, hi = inv.range
    assert lo >= 0 and hi > 1e200


# -- maximal interval ----------------------------------------------------------

def test_maximal_interval_examples():
    assert maximal_interval(even_preset("y2_over_8")) == Interval(-4, 4)
    I = maximal_interval(even_preset("y6"))
    assert I.hi == pytest.approx(R6, rel=1e-15)
    assert maximal_interval(even_preset("zero")) == LINE


def test_even_function_validation():
    with pytest.raises(ValueError):
        EvenFunction(RealFunction(lambda y: y * y, Interval(-1, 2)))
    odd = EvenFunction(RealFunction(lambda y: y**3, LINE))
    with pytest.raises(NotEvenError):
        odd.check()
    shifted = EvenFunction(RealFunction(lambda y: y * y + 1, LINE))
    with pytest.raises(NotEvenError):
        shifted.check()


def test_certified_interval_for_kink():
    P = even_preset("abs_lambda", 2.0)
    assert certified_interval(P) == LINE


def test_certified_interval_shrinks():
    # K = (y - 2|y| + y**2) / 2 has K' < 0 on (0, 1/2); the certificate cannot grow past 0
    P = EvenFunction(RealFunction(lambda y: -2 * np.abs(y) + y * y, LINE), "C0")
    with pytest.raises(MonotonicityError):
        certified_interval(P)


# -- even function -> involution ------------------------------------------------

def test_zero_gives_negation():
    r = from_even_function(even_preset("zero"))
    x = np.linspace(-50, 50, 101)
    assert np.allclose(r.h(x), -x, atol=1e-13)
    assert r.J == LINE and r.report.passed


def test_parabolic_from_y2_over_8():
    r = from_even_function(even_preset("y2_over_8"))
    assert r.I == Interval(-4, 4) and r.J == Interval(-1, 3)
    x = np.linspace(-1, 3, 502)[1:-1]
    assert np.max(np.abs(r.h(x) - (x + 4 - 4 * np.sqrt(1 + x)))) <= 1e-12
    assert np.max(np.abs(r.k(x) - (-4 + 4 * np.sqrt(1 + x)))) <= 1e-12


def test_sextic_interval_endpoints():
    r = from_even_function(even_preset("y6"))
    s = 6.0 ** 0.2
    assert abs(r.J.lo + 5 / (12 * s)) <= 1e-10
    assert abs(r.J.hi - 7 / (12 * s)) <= 1e-10
    assert r.report.passed


def test_abs_lambda_recovers_piecewise_linear():
    r = from_even_function(even_preset("abs_lambda", 2.0))
    assert r.h(1.0) == pytest.approx(-2.0, abs=1e-9)
    assert not r.h.smooth
    x = np.linspace(-10, 10, 41)
    assert np.allclose(r.h(x), catalog("piecewise_linear", (2,))(x), atol=1e-9)


def test_log_cosh_gives_log_exp():
    r = from_even_function(even_preset("log_cosh"))
    assert r.J.lo == -math.inf and r.J.hi == pytest.approx(math.log(2), abs=1e-9)
    x = np.linspace(-5, 0.6, 57)
    assert np.allclose(r.h(x), np.log(2 - np.exp(x)), atol=1e-12)


def test_constructed_identity_h_equals_kinv_of_minus_k():
    r = from_even_function(even_preset("y6"))
    x = r.J.sample(101)
    assert np.all(r.I.contains(-r.k(x)))
    assert np.allclose(r.K(-r.k(x)), r.h(x), atol=1e-12)
    assert np.allclose(r.K(r.k(x)), x, atol=1e-13)


# -- involution -> even function -------------------------------------------------

def test_negation_gives_zero():
    P = even_from_involution(catalog("negation"))
    y = np.linspace(-9, 9, 19)
    assert np.allclose(P.P(y), 0, atol=1e-14)


@pytest.mark.parametrize("lam", [0.5, 2.0, 3.0])
def test_piecewise_linear_even_function(lam):
    P = even_from_involution(catalog("piecewise_linear", (lam,)))
    assert P.continuity == "C0"
    y = np.linspace(-20, 20, 81)
    assert np.allclose(P.P(y), (1 - lam) / (1 + lam) * np.abs(y), atol=1e-12)
    if lam == 3.0:
        assert P.P(2.0) == pytest.approx(-1.0, abs=1e-12)


def test_log_exp_even_function():
    P = even_from_involution(catalog("log_exp"))
    assert P.P(2.0) == pytest.approx(-2 * math.log(math.cosh(1.0)), abs=1e-12)
    assert P.evenness_residual < 1e-9
    assert P.P.deriv(1.0) == pytest.approx(-math.tanh(0.5), abs=1e-9)


def test_even_function_of_bounded_involution_lives_on_symmetric_image():
    P = even_from_involution(catalog("parabolic"))
    assert P.I == Interval(-4, 4)
    y = np.linspace(-3.9, 3.9, 79)
    assert np.allclose(P.P(y), y * y / 8, atol=1e-12)


def test_displacement_is_increasing():
    k = displacement(catalog("rational", (1,)))
    x = k.domain.sample(101)
    assert np.all(np.diff(k(x)) > 0)


# -- symmetric equations ----------------------------------------------------------

def test_linear_equation():
    h = from_symmetric_equation(equation_preset("linear"), np.linspace(-5, 5, 101))
    x = np.linspace(-4.9, 4.9, 37)
    assert np.allclose(h(x), -x, atol=1e-12)


def test_hyperbola_equation():
    eq = equation_preset("hyperbola")
    h = from_symmetric_equation(eq, default_grid(eq.omega))
    x, y = h.info["trace_x"], h.info["trace_y"]
    assert np.max(np.abs(y + x / (1 + x))) <= 1e-12
    assert h.info["truncated"]["left"]  # the branch runs off to y = +inf before x = -1
    assert verify_involution(h, n_samples=101).passed


def test_cubic_equation():
    eq = equation_preset("cubic2")
    h = from_symmetric_equation(eq, default_grid(eq.omega))
    x, y = h.info["trace_x"], h.info["trace_y"]
    assert np.max(np.abs(y - (np.cbrt(2 - (x + 1) ** 3) - 1))) <= 1e-12
    assert h.info["f_residual"] <= 1e-12
    assert h(0.2) == pytest.approx(0.272 ** (1 / 3) - 1, abs=1e-9)
    assert verify_involution(h, n_samples=101).passed
    xs = h.J.sample(101)
    assert np.all(np.abs(h(h(xs)) - xs) <= 1e-8)


def test_symmetric_equation_errors():
    with pytest.raises(ValueError):
        from_symmetric_equation(SymmetricEquation(lambda x, y: x + 2 * y, LINE), [0.5])
    with pytest.raises(ValueError):
        from_symmetric_equation(SymmetricEquation(lambda x, y: x + y + 1, LINE), [0.5])
    with pytest.raises(NotAnInvolutionError):
        from_symmetric_equation(SymmetricEquation(lambda x, y: x**2 + y**2, LINE), [0.5])


def test_symmetric_equation_domain_is_invariant():
    eq = equation_preset("hyperbola")
    h = from_symmetric_equation(eq, default_grid(eq.omega))
    # the traced range is (-0.992, 7.992); J is cut where h carries one end onto the other
    assert h.J.hi == pytest.approx(7.992, abs=1e-12)
    assert h.J.lo == pytest.approx(-7.992 / 8.992, abs=1e-12)
    x = h.J.sample(101)
    assert np.all(h.J.contains(h(x)))
    assert np.max(np.abs(h(x) + x / (1 + x))) <= 1e-9


def test_symmetric_equation_follows_vertical_tangent():
    # on this wider square the curve passes y = -1, where d2f = 0 between grid points
    eq = SymmetricEquation(lambda x, y: (x + 1) ** 3 + (y + 1) ** 3 - 2, Interval(-1.5, 1.0))
    h = from_symmetric_equation(eq, np.linspace(-1.4, 0.9, 461))
    x, y = h.info["trace_x"], h.info["trace_y"]
    assert np.max(np.abs(y - (np.cbrt(2 - (x + 1) ** 3) - 1))) <= 1e-10
    assert np.all(np.diff(y) < 0)


# -- round trips -------------------------------------------------------------------

ROUND_TRIP = [("negation", ()), ("piecewise_linear", (2.0,)), ("log_exp", ()),
              ("rational", (1.0,)), ("rational", (2.0,)), ("rational", (-1.0,)),
              ("cube_root", (2.0,)), ("cube_root", (2.0, 1.0)), ("parabolic", ())]


@pytest.mark.parametrize("name,params", ROUND_TRIP)
def test_round_trip_involution(name, params):
    inv = catalog(name, params)
    r = from_even_function(even_from_involution(inv), n_verify=0)
    x = inv.J.sample(200)
    x = x[r.J.contains(x)]
    assert x.size >= 190
    assert np.max(np.abs(r.h(x) - inv(x))) <= 1e-7


@pytest.mark.parametrize("name", ["zero", "y2_over_8", "y6", "abs_lambda", "log_cosh"])
def test_round_trip_even(name):
    P = even_preset(name)
    r = from_even_function(P, n_verify=0)
    Q = even_from_involution(r.h)
    y = r.I.sample(200)
    diff = np.abs(Q.P(y) - P.P(y))
    assert np.count_nonzero(np.isfinite(diff)) >= 190
    assert np.nanmax(diff) <= 1e-7
