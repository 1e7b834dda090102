"""Region-of-attraction estimation with polynomial Lyapunov functions whose
level sets are grown to contain a union of shape-function ellipsoids."""

from .estimator import UnionRoaEstimator
from .poly import DynamicalSystem, Polynomial, parse_polynomial
from .vsiter import Certificate, IterationConfig, run_multiround, run_round

__all__ = [
    "Certificate",
    "DynamicalSystem",
    "IterationConfig",
    "Polynomial",
    "UnionRoaEstimator",
    "parse_polynomial",
    "run_multiround",
    "run_round",
]
__version__ = "0.1.0"
