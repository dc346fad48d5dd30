"""Continuous involutions of real intervals: construction from even
functions and symmetric equations, isochronous potentials, a planar
central-force system and a functional-differential equation with an
involutive deviating argument."""
from .core import (CATALOG_NAMES, BracketError, DomainError, Interval, Involution,
                   NotAnInvolutionError, RealFunction, VerificationReport, catalog,
                   fixed_point, homothety, normalize, verify_involution)
from .construct import (EvenFunction, SymmetricEquation, even_from_involution,
                        from_even_function, from_symmetric_equation, invert_monotone,
                        maximal_interval)
from .isochrony import (Potential, involution_from_potential, necessary_conditions, period,
                        potential_from_involution, verify_isochrony)
from .centralforce import (CentralForceSystem, State4, Trajectory, figure5_experiment,
                           simulate, stability_condition)
from .fde import FdeProblem, FdeSolution, closed_form, residual_check, solve_numeric

__version__ = "0.1.0"

__all__ = [
    "CATALOG_NAMES", "BracketError", "DomainError", "Interval", "Involution",
    "NotAnInvolutionError", "RealFunction", "VerificationReport", "catalog", "fixed_point",
    "homothety", "normalize", "verify_involution", "EvenFunction", "SymmetricEquation",
    "even_from_involution", "from_even_function", "from_symmetric_equation",
    "invert_monotone", "maximal_interval", "Potential", "involution_from_potential",
    "necessary_conditions", "period", "potential_from_involution", "verify_isochrony",
    "CentralForceSystem", "State4", "Trajectory", "figure5_experiment", "simulate",
    "stability_condition", "FdeProblem", "FdeSolution", "closed_form", "residual_check",
    "solve_numeric",
]
