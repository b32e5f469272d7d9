"""logicforge: a small DSL for finite-domain search problems.

Source text is parsed and checked into an AST, lowered into an integer
constraint model, and solved by a native backtracking solver with
all-different propagation. A C harness emitter, an agent pipeline with error
recovery around a pluggable formalizer, and a logic-grid-puzzle benchmark
harness sit on top.
"""

from .frontend import CheckedProgram, DslProgram, SourceText, check, parse, pretty
from .model import ConstraintModel, SolutionTable, decode, lower
from .solver import Budget, SolveOutcome, brute_force, find_second, solve

__version__ = "0.1.0"

__all__ = [
    "Budget",
    "CheckedProgram",
    "ConstraintModel",
    "DslProgram",
    "SolutionTable",
    "SolveOutcome",
    "SourceText",
    "brute_force",
    "check",
    "decode",
    "find_second",
    "lower",
    "parse",
    "pretty",
    "solve",
]
