"""Command-line front end.

Exit status: 0 on success, 1 when a verification fails, 2 on usage errors
(bad flags, invalid parameters, unwritable output).  Default tolerances and
sample counts can be overridden through ``INVOLUTIONS_TOL``,
``INVOLUTIONS_SAMPLES`` and ``INVOLUTIONS_RTOL``.
"""
from __future__ import annotations

import argparse
import os
import sys
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path

import numpy as np

from . import centralforce as cf
from . import construct as cs
from . import fde
from . import isochrony as iso
from .core import CATALOG_NAMES, Interval, catalog, verify_involution
from .export import csv_text, json_text

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def _env_float(name: str, default: float) -> float:
    raw = os.environ.get(name)
    if raw is None:
        return default
    try:
        v = float(raw)
    except ValueError:
        raise UsageError(f"{name}={raw!r} is not a number") from None
    if not v > 0:
        raise UsageError(f"{name} must be positive")
    return v


def _env_int(name: str, default: int) -> int:
    raw = os.environ.get(name)
    if raw is None:
        return default
    try:
        v = int(raw)
    except ValueError:
        raise UsageError(f"{name}={raw!r} is not an integer") from None
    if v < 3:
        raise UsageError(f"{name} must be at least 3")
    return v


def _positive(text: str) -> float:
    v = float(text)
    if not v > 0:
        raise argparse.ArgumentTypeError(f"{text} is not positive")
    return v


def _count(text: str) -> int:
    v = int(text)
    if v < 3:
        raise argparse.ArgumentTypeError(f"{text} is below the minimum of 3")
    return v


# ---------------------------------------------------------------------------
# Output
# ---------------------------------------------------------------------------


def _emit(args, text: str):
    if args.output in (None, "-"):
        sys.stdout.write(text)
        return
    try:
        Path(args.output).write_text(text, encoding="utf-8", newline="\n")
    except OSError as exc:
        raise UsageError(f"cannot write {args.output}: {exc}") from None


def _table_or_json(args, header, rows, summary):
    if args.emit == "csv":
        _emit(args, csv_text(header, rows))
    else:
        _emit(args, json_text(summary))


def _involution_table(inv, n):
    x = inv.J.sample(n)
    return np.column_stack([x, inv(x)])


def _catalog_args(p):
    p.add_argument("--catalog", choices=CATALOG_NAMES, help="catalog involution")
    p.add_argument("--params", type=float, nargs="*", default=[], help="catalog parameters")


def _catalog_from(args):
    try:
        return catalog(args.catalog, args.params)
    except ValueError as exc:
        raise UsageError(str(exc)) from None


# ---------------------------------------------------------------------------
# Subcommands
# ---------------------------------------------------------------------------


def cmd_catalog(args) -> int:
    if args.catalog is None:
        entries = []
        for name, params in [("negation", ()), ("piecewise_linear", (2.0,)), ("log_exp", ()),
                             ("rational", (1.0,)), ("cube_root", (2.0,)),
                             ("cube_root", (2.0, 1.0)), ("parabolic", ())]:
            entries.append(catalog(name, params).to_json())
        _emit(args, json_text({"catalog": entries}))
        return EXIT_OK
    inv = _catalog_from(args)
    _table_or_json(args, ("x", "h"), _involution_table(inv, args.n), inv.to_json())
    return EXIT_OK


def cmd_construct(args) -> int:
    key = cs.EVEN_ALIASES.get(args.even)
    if key is None:
        raise UsageError(f"unknown even function {args.even!r}; "
                         f"known: {', '.join(sorted(set(cs.EVEN_ALIASES.values())))}")
    if key == "abs_lambda" and not args.lam > 0:
        raise UsageError("--lam must be positive")
    r = cs.from_even_function(cs.even_preset(key, args.lam), n_verify=args.n_samples)
    summary = {"even": key, "I": r.I.to_json(), "J": r.J.to_json(),
               "verification": r.report}
    _table_or_json(args, ("x", "h"), _involution_table(r.h, args.n), summary)
    return EXIT_OK if r.report.passed else EXIT_FAIL


def cmd_implicit(args) -> int:
    eq = cs.equation_preset(args.equation)
    h = cs.from_symmetric_equation(eq, cs.default_grid(eq.omega, n=args.n))
    rep = verify_involution(h, n_samples=args.n_samples, atol=args.tol, rtol=args.tol)
    rows = np.column_stack([h.info["trace_x"], h.info["trace_y"]])
    summary = {"equation": eq.name, "J": h.J.to_json(), "truncated": h.info["truncated"],
               "f_residual": h.info["f_residual"], "verification": rep}
    _table_or_json(args, ("x", "h"), rows, summary)
    return EXIT_OK if rep.passed else EXIT_FAIL


def cmd_verify(args) -> int:
    if args.catalog is None and args.even is None:
        raise UsageError("verify needs --catalog or --even")
    if args.catalog is not None:
        inv = _catalog_from(args)
    else:
        key = cs.EVEN_ALIASES.get(args.even)
        if key is None:
            raise UsageError(f"unknown even function {args.even!r}")
        inv = cs.from_even_function(cs.even_preset(key, args.lam), n_verify=0).h
    rep = verify_involution(inv, n_samples=args.n_samples, atol=args.tol, rtol=args.tol)
    _emit(args, json_text({"involution": inv.to_json(), "report": rep}))
    return EXIT_OK if rep.passed else EXIT_FAIL


def _potential_from(args) -> iso.Potential:
    if args.preset is not None:
        if args.preset == "rational":
            return iso.potential_preset("rational", args.omega, args.params[0] if args.params else 1.0)
        return iso.potential_preset(args.preset, args.omega)
    if args.catalog is None:
        raise UsageError("give --catalog or --preset")
    inv = _catalog_from(args)
    if not inv.smooth:
        raise UsageError(f"{inv.name} is not smooth; the force term needs h'")
    return iso.potential_from_involution(inv, args.omega)


def cmd_potential(args) -> int:
    pot = _potential_from(args)
    x = pot.J.sample(args.n)
    rows = np.column_stack([x, pot.V(x), pot.g(x)])
    nc = iso.necessary_conditions(pot) if pot.omega else None
    summary = {"name": pot.name, "omega": pot.omega, "J": pot.J.to_json(),
               "energy_max": pot.energy_max(), "necessary_conditions": nc}
    _table_or_json(args, ("x", "V", "g"), rows, summary)
    return EXIT_OK


def cmd_period(args) -> int:
    pot = _potential_from(args)
    energies = args.energies if args.energies else iso.energy_grid(pot, args.n_energies)
    try:
        rep = iso.verify_isochrony(pot, energies, tol=args.tol, parallel=args.parallel)
    except iso.EnergyError as exc:
        raise UsageError(str(exc)) from None
    rows = [(e, t, tr, t - rep.target) for e, t, tr in
            zip(rep.energies, rep.periods, rep.return_map_periods)]
    _table_or_json(args, ("E", "T_quadrature", "T_return_map", "deviation"), rows, rep)
    if args.check and not rep.passed:
        return EXIT_FAIL
    return EXIT_OK


def _force_from(args) -> cf.CentralForceSystem:
    try:
        return cf.force_preset(args.force, a=args.a, c=args.c)
    except ValueError as exc:
        raise UsageError(str(exc)) from None


def cmd_stability(args) -> int:
    rep = cf.stability_condition(_force_from(args), n=args.n_samples, tol=args.tol)
    _emit(args, json_text(rep))
    if args.expect is not None and rep.verdict != args.expect:
        return EXIT_FAIL
    return EXIT_OK


def cmd_simulate(args) -> int:
    sys_ = _force_from(args)
    x, vx, y, vy = args.state
    tr = cf.simulate(sys_, cf.State4(x, vx, y, vy), args.t_end, args.dt, rtol=args.rtol)
    summary = {"force": sys_.name, "state": args.state, "t_end": args.t_end,
               "drift_E": tr.drift_E, "drift_L": tr.drift_L, "E_x": tr.E_x[0], "L": tr.L[0]}
    _table_or_json(args, cf.Trajectory.COLUMNS, tr.rows(), summary)
    return EXIT_OK


def cmd_fde(args) -> int:
    try:
        p = fde.FdeProblem(args.a, args.y0, Interval(args.t_lo, args.t_hi))
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    sol = fde.solve_numeric(p, n=args.n)
    res = fde.residual_check(sol)
    lo, hi = max(args.t_lo, 0.0), args.t_hi
    err = fde.max_error(sol, lo, hi) if hi > lo else fde.max_error(sol, args.t_lo, args.t_hi)
    summary = {"a": args.a, "y0": args.y0, "regime": sol.regime, "t_span": p.t_span.to_json(),
               "solved_range": sol.coverage.to_json(), "max_error": err, "residual": res}
    _table_or_json(args, ("t", "y_numeric", "y_closed_form", "residual"), sol.rows(), summary)
    return EXIT_OK


# ---------------------------------------------------------------------------
# Figures
# ---------------------------------------------------------------------------


def _series(name, x, y):
    return [(name, a, b) for a, b in zip(x, y)]


def figure_data(which: int, n: int = 801):
    """``(files, meta)``: CSV tables (long format ``series, x, y``) and the
    sidecar metadata for one figure."""
    if which in (1, 2):
        key = "y2_over_8" if which == 1 else "y6"
        r = cs.from_even_function(cs.even_preset(key), n_verify=0)
        x = r.J.sample(n)
        rows = _series("h", x, r.h(x)) + _series("diagonal", x, x)
        meta = {"figure": which, "even": key, "I": r.I.to_json(), "J": r.J.to_json()}
        return {f"figure{which}.csv": (("series", "x", "y"), rows)}, meta
    if which == 3:
        inv = catalog("cube_root", (2.0,))
        x = np.linspace(-3.0, 3.0, n)
        rows = _series("h", x, inv(x)) + _series("diagonal", x, x)
        meta = {"figure": 3, "involution": inv.to_json(), "window": [-3.0, 3.0]}
        return {"figure3.csv": (("series", "x", "y"), rows)}, meta
    if which == 4:
        eq = cs.equation_preset("cubic2")
        h = cs.from_symmetric_equation(eq, cs.default_grid(eq.omega, n=n))
        glob = catalog("cube_root", (2.0,))
        xw = np.linspace(-3.0, 3.0, n)
        rows = (_series("h", h.info["trace_x"], h.info["trace_y"])
                + _series("cubic_curve", xw, glob(xw))
                + _series("line_L", xw, -xw - 2.0) + _series("diagonal", xw, xw))
        traced = [float(h.info["trace_x"][0]), float(h.info["trace_x"][-1])]
        meta = {"figure": 4, "equation": "(x+1)^3+(y+1)^3-2=0", "J": h.J.to_json(),
                "traced": traced,
                "region": eq.omega.to_json(), "line_L": "x+y+2=0", "window": [-3.0, 3.0]}
        return {"figure4.csv": (("series", "x", "y"), rows)}, meta
    if which == 5:
        wins = cf.figure5_experiment()
        files = {}
        for (a, b), w in zip(cf.FIGURE5_WINDOWS, wins):
            files[f"figure5_t{a:g}-{b:g}.csv"] = (("t", "x", "y"),
                                                 np.column_stack([w.t, w.x, w.y]))
        meta = {"figure": 5, "force": "1+x^2", "state": list(cf.FIGURE5_STATE),
                "windows": [list(w) for w in cf.FIGURE5_WINDOWS],
                "drift_E": wins[-1].drift_E, "drift_L": wins[-1].drift_L,
                "max_radius": [w.max_radius() for w in wins]}
        return files, meta
    raise UsageError(f"figure {which} does not exist (1..5)")


def cmd_figures(args) -> int:
    which = args.which or [1, 2, 3, 4, 5]
    out = Path(args.outdir)
    try:
        out.mkdir(parents=True, exist_ok=True)
    except OSError as exc:
        raise UsageError(f"cannot create {out}: {exc}") from None
    if args.parallel:
        with ThreadPoolExecutor() as ex:
            results = list(ex.map(lambda w: figure_data(w, args.n), which))
    else:
        results = [figure_data(w, args.n) for w in which]
    written = []
    for w, (files, meta) in zip(which, results):
        for fname, (header, rows) in files.items():
            _write(out / fname, csv_text(header, rows))
            written.append(fname)
        _write(out / f"figure{w}.json", json_text(meta))
        written.append(f"figure{w}.json")
    sys.stdout.write("\n".join(written) + "\n")
    return EXIT_OK


def _write(path: Path, text: str):
    try:
        path.write_text(text, encoding="utf-8", newline="\n")
    except OSError as exc:
        raise UsageError(f"cannot write {path}: {exc}") from None


def cmd_suite(args) -> int:
    from .suite import run_suite

    results = run_suite(parallel=args.parallel)
    if args.emit == "json":
        _emit(args, json_text({"checks": results, "passed": all(r.passed for r in results)}))
    else:
        _emit(args, "".join(r.line() + "\n" for r in results))
    return EXIT_OK if all(r.passed for r in results) else EXIT_FAIL


# ---------------------------------------------------------------------------
# Parser
# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    tol = _env_float("INVOLUTIONS_TOL", 1e-9)
    samples = _env_int("INVOLUTIONS_SAMPLES", 100)
    rtol = _env_float("INVOLUTIONS_RTOL", 1e-10)

    parser = _Parser(prog="involutions", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def common(p, emit=True, default="csv"):
        p.add_argument("-o", "--output", help="output file (default: standard output)")
        if emit:
            p.add_argument("--emit", choices=("csv", "json"), default=default)

    p = sub.add_parser("catalog", help="list catalog involutions or tabulate one")
    _catalog_args(p)
    p.add_argument("--n", type=_count, default=201)
    common(p, default="json")
    p.set_defaults(func=cmd_catalog)

    p = sub.add_parser("construct", help="involution from a built-in even function")
    p.add_argument("--even", required=True, help="y^2/8, y^6, abs_lambda, log_cosh, zero")
    p.add_argument("--lam", type=float, default=2.0, help="lambda for abs_lambda")
    p.add_argument("--n", type=_count, default=201, help="table rows")
    p.add_argument("--n-samples", type=_count, default=samples)
    common(p)
    p.set_defaults(func=cmd_construct)

    p = sub.add_parser("implicit", help="involution traced from a symmetric equation")
    p.add_argument("--equation", choices=("linear", "hyperbola", "cubic2"), required=True)
    p.add_argument("--n", type=_count, default=2001, help="grid points")
    p.add_argument("--n-samples", type=_count, default=samples)
    p.add_argument("--tol", type=_positive, default=tol)
    common(p)
    p.set_defaults(func=cmd_implicit)

    p = sub.add_parser("verify", help="check the involution axioms")
    _catalog_args(p)
    p.add_argument("--even", help="verify the involution built from this even function")
    p.add_argument("--lam", type=float, default=2.0)
    p.add_argument("--n-samples", type=_count, default=samples)
    p.add_argument("--tol", type=_positive, default=tol)
    common(p, emit=False)
    p.set_defaults(func=cmd_verify)

    for name, helptext, func in (("potential", "isochronous potential table", cmd_potential),
                                 ("period", "periods over an energy sweep", cmd_period)):
        p = sub.add_parser(name, help=helptext)
        _catalog_args(p)
        p.add_argument("--preset", choices=iso.POTENTIAL_PRESETS)
        p.add_argument("--omega", type=_positive, default=1.0)
        if name == "potential":
            p.add_argument("--n", type=_count, default=201)
        else:
            p.add_argument("--energies", type=_positive, nargs="*")
            p.add_argument("--n-energies", type=_count, default=5)
            p.add_argument("--tol", type=_positive, default=1e-6)
            p.add_argument("--check", action="store_true",
                           help="exit 1 unless the sweep is isochronous")
            p.add_argument("--parallel", action="store_true")
        common(p)
        p.set_defaults(func=func)

    for name, helptext, func in (("stability", "stability identity at the origin", cmd_stability),
                                 ("simulate", "integrate an orbit", cmd_simulate)):
        p = sub.add_parser(name, help=helptext)
        p.add_argument("--force", choices=cf.FORCE_PRESETS, required=True)
        p.add_argument("--a", type=float, default=1.0, help="parameter of the rational force")
        p.add_argument("--c", type=_positive, default=1.0, help="value of the constant force")
        if name == "stability":
            p.add_argument("--n-samples", type=_count, default=101)
            p.add_argument("--tol", type=_positive, default=1e-8)
            p.add_argument("--expect", choices=("stable", "unstable"))
            common(p, emit=False)
        else:
            p.add_argument("--state", type=float, nargs=4, default=list(cf.FIGURE5_STATE),
                           metavar=("X", "VX", "Y", "VY"))
            p.add_argument("--t-end", type=_positive, default=38.0)
            p.add_argument("--dt", type=_positive, default=0.01)
            p.add_argument("--rtol", type=_positive, default=rtol)
            common(p)
        p.set_defaults(func=func)

    p = sub.add_parser("fde", help="solve y'(t) = a y(-t/(1+t))")
    p.add_argument("--a", type=float, required=True)
    p.add_argument("--y0", type=float, default=1.0)
    p.add_argument("--t-lo", type=float, default=0.0)
    p.add_argument("--t-hi", type=float, default=10.0)
    p.add_argument("--n", type=_count, default=4001)
    common(p)
    p.set_defaults(func=cmd_fde)

    p = sub.add_parser("figures", help="plot data for the five figures")
    p.add_argument("--which", type=int, nargs="*", choices=range(1, 6))
    p.add_argument("--outdir", default="figures")
    p.add_argument("--n", type=_count, default=801)
    p.add_argument("--parallel", action="store_true")
    p.set_defaults(func=cmd_figures)

    p = sub.add_parser("suite", help="run every self-check")
    p.add_argument("--parallel", action="store_true")
    p.add_argument("-o", "--output", help="output file (default: standard output)")
    p.add_argument("--emit", choices=("text", "json"), default="text")
    p.set_defaults(func=cmd_suite)
    return parser


def run(argv=None) -> int:
    try:
        parser = build_parser()
        args = parser.parse_args(argv)
        return args.func(args)
    except UsageError as exc:
        sys.stderr.write(f"involutions: error: {exc}\n")
        return EXIT_USAGE
    except (ValueError, ArithmeticError) as exc:
        sys.stderr.write(f"involutions: error: {type(exc).__name__}: {exc}\n")
        return EXIT_USAGE


def main() -> None:
    try:
        code = run()
        sys.stdout.flush()
    except BrokenPipeError:
        # reader went away (e.g. piped into head); silence the flush at exit
        os.dup2(os.open(os.devnull, os.O_WRONLY), sys.stdout.fileno())
        code = 1
    sys.exit(code)


if __name__ == "__main__":
    main()
