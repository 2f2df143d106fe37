"""Dynamic programming models with state-space search."""

from .model import Dominance, Model, ModelError, Transition
from .oracle import Oracle, oracle_solve, validate_solution
from .solver import Solution, solve

__all__ = [
    "Dominance",
    "Model",
    "ModelError",
    "Oracle",
    "Solution",
    "Transition",
    "oracle_solve",
    "solve",
    "validate_solution",
]
