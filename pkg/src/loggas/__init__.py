"""Log-gas numerics: orthogonal-polynomial zeros as Stieltjes equilibria,
quantum Hamilton-Jacobi bound states, Gaussian beta-ensembles and the
exceptional X1 Laguerre sector.
"""
from . import electrostatics, errors, numerics, orthopoly, qhj, rmt, xpoly
from .electrostatics import Superpotential, equilibrium_superpotential, solve_equilibrium
from .errors import (ConvergenceError, DegenerateError, DomainError, EvaluationError,
                     IntegrationError, InvalidInputError, LogGasError, UnsupportedFormError)
from .numerics import RandomStream, substream
from .orthopoly import OrthogonalFamily, PointConfiguration, Polynomial, zeros

__version__ = "0.1.0"

__all__ = [
    "electrostatics", "errors", "numerics", "orthopoly", "qhj", "rmt", "xpoly",
    "Superpotential", "equilibrium_superpotential", "solve_equilibrium",
    "ConvergenceError", "DegenerateError", "DomainError", "EvaluationError",
    "IntegrationError", "InvalidInputError", "LogGasError", "UnsupportedFormError",
    "RandomStream", "substream", "OrthogonalFamily", "PointConfiguration", "Polynomial", "zeros",
]
