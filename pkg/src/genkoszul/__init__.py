"""Exact graded-module computations for generalized Koszul complexes."""

from .linalg import ExactMatrix, PrimeField, RationalField, kernel_basis, rank, rref
from .ring import HomPoly, WeightedRing
from .scenario import Scenario, load_scenario

__all__ = [
    "ExactMatrix",
    "PrimeField",
    "RationalField",
    "kernel_basis",
    "rank",
    "rref",
    "HomPoly",
    "WeightedRing",
    "Scenario",
    "load_scenario",
]

__version__ = "0.1.0"
