"""Testing proportionality of the means of two multivariate normal vectors.

The likelihood-ratio statistic is the smallest eigenvalue of a 2x2 Wishart
matrix; its law is stochastically dominated by chi-square with ``p - 1``
degrees of freedom, so the usual chi-square test is valid (conservative)
in every dimension.
"""

from .core import (
    INFINITE_SLOPE,
    EigenPair,
    FiellerInterval,
    GramMatrix,
    Sample,
    TestOutcome,
    eigen2,
    fieller_interval,
    gram,
    minimize_pivot,
    pivot,
    proportionality_test,
    whiten,
)
from .exceptions import ConvergenceError, DimensionError, DomainError
from .montecarlo import SimulationConfig, simulate_cdf, simulate_sizes
from .wishart import NoncentralSpec, lambda2_cdf, noncentral_marginal_density

__version__ = "0.1.0"
