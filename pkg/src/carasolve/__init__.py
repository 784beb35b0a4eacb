"""Maximal integral solutions of scalar ODEs with discontinuous right-hand side."""

from .errors import (
    CarasolveError,
    ConfigurationError,
    DomainError,
    NotCertifiedError,
    PreconditionError,
    ShapeError,
)
from .gridapprox import ApproxRhs, StepGrid, build_step_grid, convergence_probe, eval_fn
from .quadrature import GridFunction, Partition, cumulative, integrate, picard_map
from .rhs import (
    BUILTIN_NAMES,
    CauchyProblem,
    Rhs,
    SectionProps,
    builtin_rhs,
    make_problem,
    probe_section_properties,
)
from .scenarios import demo_positive, demo_sign, demo_sin
from .solver import SolveOptions, SolveResult, euler, residual, solve_maximal, solve_minimal
from .subsolution import fatou_check, join, upper_envelope, verify_subsolution, witness

__version__ = "0.1.0"

__all__ = [
    "ApproxRhs", "BUILTIN_NAMES", "CarasolveError", "CauchyProblem", "ConfigurationError",
    "DomainError", "GridFunction", "NotCertifiedError", "Partition", "PreconditionError",
    "Rhs", "SectionProps", "ShapeError", "SolveOptions", "SolveResult", "StepGrid",
    "build_step_grid", "builtin_rhs", "convergence_probe", "cumulative", "demo_positive",
    "demo_sign", "demo_sin", "euler", "eval_fn", "fatou_check", "integrate", "join",
    "make_problem", "picard_map", "probe_section_properties", "residual", "solve_maximal",
    "solve_minimal", "upper_envelope", "verify_subsolution", "witness",
]
