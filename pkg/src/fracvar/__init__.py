"""Fractional variational problems with Caputo derivatives and weighted functionals.

Subpackages and modules:

* :mod:`fracvar.fracops`: grids, fractional integrals, Caputo derivative, functional.
* :mod:`fracvar.lagrange`: the Lagrangian expression language and its jets.
* :mod:`fracvar.conditions`: Euler-Lagrange, Weierstrass, Legendre and corner checks.
* :mod:`fracvar.variations`: du Bois-Reymond and special (needle-type) variations.
* :mod:`fracvar.solver`: direct and isoperimetric numerical solution.
* :mod:`fracvar.cli`: the ``fracvar`` command.
"""

__version__ = "0.1.0"

from .errors import (
    BracketError,
    DivergedEvaluation,
    EndpointResidualError,
    FracvarError,
    InadmissibleEpsilon,
    LagrangianDomainError,
    NonSmoothError,
    ParseError,
    RegimeMismatch,
)
from .fracops import FracTrajectory, Grid, Interval, Orders, PiecewiseSample, Regime, make_graded_grid
from .lagrange import parse_lagrangian
from .problem import Constraint, Multipliers, Problem

__all__ = [
    "BracketError",
    "Constraint",
    "DivergedEvaluation",
    "EndpointResidualError",
    "FracTrajectory",
    "FracvarError",
    "Grid",
    "InadmissibleEpsilon",
    "Interval",
    "LagrangianDomainError",
    "Multipliers",
    "NonSmoothError",
    "Orders",
    "ParseError",
    "PiecewiseSample",
    "Problem",
    "Regime",
    "RegimeMismatch",
    "__version__",
    "make_graded_grid",
    "parse_lagrangian",
]
