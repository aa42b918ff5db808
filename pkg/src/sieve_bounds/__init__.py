"""Loss integrals and bound assembly for a Harman-sieve argument on primes in short intervals."""

from .bounds import BoundReport, Policy, compute_bound, lower_bound, table, upper_bound
from .buchstab import BuchstabKind, omega_piecewise
from .integrals import IntegralSpec, catalog, find_spec
from .quadrature import IntegralEstimate, integrate
from .regions import RegionConfig, in_region, tables_for
from .sieve_params import ThetaParams, alpha_star, gamma_of_theta, nu

__all__ = [
    "BoundReport", "BuchstabKind", "IntegralEstimate", "IntegralSpec", "Policy", "RegionConfig",
    "ThetaParams", "alpha_star", "catalog", "compute_bound", "find_spec", "gamma_of_theta",
    "in_region", "integrate", "lower_bound", "nu", "omega_piecewise", "table",
    "tables_for", "upper_bound",
]
