"""Approximation algorithms for activation edge-multicover."""

from .errors import InfeasibleInstance, InputError, OracleTooLarge, TauTooSmall
from .model import (
    ActivationEdge,
    Instance,
    LevelAssignment,
    activation_cost,
    coverage_degree,
    induced_levels,
    is_feasible,
    max_requirement,
    slope,
)
from .solver import SolveConfig, SolveReport, solve

__all__ = [
    "ActivationEdge",
    "Instance",
    "LevelAssignment",
    "InfeasibleInstance",
    "InputError",
    "OracleTooLarge",
    "TauTooSmall",
    "SolveConfig",
    "SolveReport",
    "activation_cost",
    "coverage_degree",
    "induced_levels",
    "is_feasible",
    "max_requirement",
    "slope",
    "solve",
]
