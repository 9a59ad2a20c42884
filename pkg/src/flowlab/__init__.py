"""Spectral flow of the interval Laplacian under node deltas.

Three independent solvers for the eigenvalue flow of -u'' + V u with delta
potentials of growing strength at the nodes of a chosen eigenfunction:
closed form (zero potential), Chebyshev collocation on the path quantum
graph, and transfer-matrix shooting.  The ``flowlab`` CLI reproduces the
reference tables, limit matrices, and ratio experiments built on them.
"""

from .core import (
    AmplitudeMatrix,
    AnalyticEigenpair,
    CollocationEigenpair,
    ConfigurationError,
    DomainError,
    FlowProblem,
    NumericError,
    PiecewisePotential,
    canonical_problem,
    problem_with_potential,
)

__version__ = "0.1.0"

__all__ = [
    "AmplitudeMatrix",
    "AnalyticEigenpair",
    "CollocationEigenpair",
    "ConfigurationError",
    "DomainError",
    "FlowProblem",
    "NumericError",
    "PiecewisePotential",
    "canonical_problem",
    "problem_with_potential",
    "__version__",
]
