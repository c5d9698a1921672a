"""Fitness landscapes represented by valued constraints."""

from .core import (
    Constraint,
    SimpleInstance,
    VcspInstance,
    constraint_graph,
    evaluate,
    parse,
    serialize,
)
from .errors import BudgetError, GeneratorError, InfeasibleError, UnsupportedError, ValidationError, VcspError

__version__ = "0.1.0"

__all__ = [
    "Constraint",
    "SimpleInstance",
    "VcspInstance",
    "constraint_graph",
    "evaluate",
    "parse",
    "serialize",
    "VcspError",
    "ValidationError",
    "UnsupportedError",
    "BudgetError",
    "InfeasibleError",
    "GeneratorError",
]
