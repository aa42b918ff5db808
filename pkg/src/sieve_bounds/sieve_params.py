"""Theta-dependent sieve parameters: nu0, gamma(theta), the intervals I_h, nu(alpha), alpha*(alpha)."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

from numba import njit

THETA_MIN = 0.505
THETA_MAX = 0.535
DEFAULT_G_MAX = 64


def _check_theta(theta: float) -> None:
    if not THETA_MIN <= theta <= THETA_MAX:
        raise ValueError(f"theta={theta} outside [{THETA_MIN}, {THETA_MAX}]")


def gamma_g(theta: float, g: int) -> float:
    if g < 1:
        raise ValueError("g must be a positive integer")
    return min(
        4.0 * theta - 2.0,
        ((8 * g - 4) * theta - (4 * g - 3)) / (4 * g - 1),
        (24 * g * theta - (12 * g + 1)) / (4 * g - 1),
    )


def gamma_of_theta(theta: float, g_max: int = DEFAULT_G_MAX) -> float:
    """max over 1 <= g <= g_max of gamma_g(theta)."""
    _check_theta(theta)
    return max(gamma_g(theta, g) for g in range(1, g_max + 1))


def gamma_is_stable(theta: float, g_max: int = DEFAULT_G_MAX) -> bool:
    """True when doubling the search cap leaves gamma unchanged."""
    return gamma_of_theta(theta, g_max) == gamma_of_theta(theta, 2 * g_max)


@dataclass(frozen=True)
class ThetaParams:
    theta: float
    g_max: int = DEFAULT_G_MAX
    nu0: float = field(init=False)
    gamma: float = field(init=False)

    def __post_init__(self) -> None:
        _check_theta(self.theta)
        object.__setattr__(self, "nu0", 2.0 * self.theta - 1.0)
        object.__setattr__(self, "gamma", gamma_of_theta(self.theta, self.g_max))


@njit(cache=True)
def interval_index_nb(theta, alpha):
    # alpha in I_h  <=>  h - 1 < (1/2 - alpha)/(2 theta - 1) <= h
    q = (0.5 - alpha) / (2.0 * theta - 1.0)
    r = round(q)
    if abs(q - r) < 1e-12:
        q = r
    h = int(math.ceil(q))
    return max(h, 1)


@njit(cache=True)
def nu_nb(theta, gamma, alpha):
    h = interval_index_nb(theta, alpha)
    return min(2.0 * (theta - alpha) / (2 * h - 1), gamma)


@njit(cache=True)
def alpha_star_nb(theta, alpha):
    h = interval_index_nb(theta, alpha)
    d = 2 * h - 1
    return max((2 * h * (1.0 - theta) - alpha) / d, (2 * (h - 1) * theta + alpha) / d)


def _check_alpha(alpha: float) -> None:
    if not 0.0 <= alpha <= 0.5:
        raise ValueError(f"alpha={alpha} outside [0, 1/2]")


def interval_index(theta: float, alpha: float) -> int:
    """The h >= 1 with alpha in [1/2 - 2h(theta-1/2), 1/2 - (2h-2)(theta-1/2))."""
    _check_alpha(alpha)
    return int(interval_index_nb(theta, alpha))


def nu(theta: float, alpha: float, gamma: float | None = None) -> float:
    _check_alpha(alpha)
    if gamma is None:
        gamma = gamma_of_theta(theta)
    return float(nu_nb(theta, gamma, alpha))


def alpha_star(theta: float, alpha: float) -> float:
    _check_alpha(alpha)
    return float(alpha_star_nb(theta, alpha))
