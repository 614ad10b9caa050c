"""Lagrangian expression language with exact first and second derivatives."""

from .jet import JetBatch, JetValue, eval_jet, eval_jets, evaluate
from .parser import FUNCTIONS, LagrangianExpr, combine, parse_lagrangian, to_source

__all__ = [
    "FUNCTIONS",
    "JetBatch",
    "JetValue",
    "LagrangianExpr",
    "combine",
    "eval_jet",
    "eval_jets",
    "evaluate",
    "parse_lagrangian",
    "to_source",
]
