"""Buchstab's function and the envelopes used to bound it.

omega(u) = 1/u on [1, 2] and (u omega(u))' = omega(u - 1) for u > 2.  The
closed forms on [1, 4) are exact; beyond 4 only the constant envelopes
0.5612 (lower) and 0.5617 (upper) are used by the integrals.
"""

from __future__ import annotations

import enum
import math
from functools import lru_cache

import numpy as np
from numba import njit
from scipy.integrate import cumulative_simpson, quad

LOWER_CONST = 0.5612
UPPER_CONST = 0.5617
SIMPLE_CONST = 0.5672


class BuchstabKind(enum.IntEnum):
    EXACT = 0
    LOWER = 1
    UPPER = 2
    SIMPLE_UPPER = 3


# 20-point Gauss-Legendre rule on [0, 1], used by the compiled J evaluator.
_GL_X, _GL_W = np.polynomial.legendre.leggauss(20)
_GL_X = 0.5 * (_GL_X + 1.0)
_GL_W = 0.5 * _GL_W


def _j_integrand(t: float) -> float:
    return math.log(t - 1.0) / t


def j_integral(u: float) -> float:
    """J(u) = int_2^{u-1} log(t-1)/t dt for 3 <= u < 4."""
    if not 3.0 <= u < 4.0:
        raise ValueError(f"j_integral needs 3 <= u < 4, got {u}")
    if u == 3.0:
        return 0.0
    val, _ = quad(_j_integrand, 2.0, u - 1.0, epsabs=1e-14, epsrel=1e-14, limit=200)
    return val


@njit(cache=True)
def j_fast(u):
    # substitute s = t - 1: int_1^{u-2} log(s)/(1+s) ds, smooth on [1, 2]
    b = u - 2.0
    if b <= 1.0:
        return 0.0
    h = b - 1.0
    acc = 0.0
    for i in range(_GL_X.size):
        s = 1.0 + h * _GL_X[i]
        acc += _GL_W[i] * math.log(s) / (1.0 + s)
    return acc * h


@njit(cache=True)
def omega_kernel(u, kind):
    """Compiled evaluator; kind is a BuchstabKind value.  Returns nan on a bad domain."""
    if u < 1.0:
        return np.nan
    if kind == 3:
        return max(1.0 / u, SIMPLE_CONST)
    if u < 2.0:
        return 1.0 / u
    if u < 3.0:
        return (1.0 + math.log(u - 1.0)) / u
    if u < 4.0:
        return (1.0 + math.log(u - 1.0) + j_fast(u)) / u
    if kind == 1:
        return LOWER_CONST
    if kind == 2:
        return UPPER_CONST
    return np.nan


def omega_piecewise(u: float, kind: BuchstabKind) -> float:
    """Piecewise closed form of omega (Exact, u < 4) or of one of its bounds."""
    kind = BuchstabKind(kind)
    if u < 1.0:
        raise ValueError(f"omega is defined for u >= 1, got {u}")
    if kind is BuchstabKind.SIMPLE_UPPER:
        return max(1.0 / u, SIMPLE_CONST)
    if u < 2.0:
        return 1.0 / u
    if u < 3.0:
        return (1.0 + math.log(u - 1.0)) / u
    if u < 4.0:
        return (1.0 + math.log(u - 1.0) + j_integral(u)) / u
    if kind is BuchstabKind.LOWER:
        return LOWER_CONST
    if kind is BuchstabKind.UPPER:
        return UPPER_CONST
    raise ValueError("exact closed form is only available for u < 4; use omega_exact_ode")


_ODE_STEPS = 20000  # grid points per unit interval


@lru_cache(maxsize=4)
def _ode_table(n_units: int) -> tuple[np.ndarray, np.ndarray]:
    # March u*omega(u) = k*omega(k) + int_k^u omega(t-1) dt one unit at a time,
    # starting from 1/u on [1, 2].  Kinks of omega sit at integers, so each unit
    # integrand is smooth and Simpson converges at full order.
    n = _ODE_STEPS
    grid = np.linspace(0.0, 1.0, n + 1)
    pieces = [1.0 / (1.0 + grid)]
    for k in range(2, 1 + n_units):
        prev = pieces[-1]
        u = k + grid
        integral = cumulative_simpson(prev, x=u, initial=0.0)
        pieces.append((k * prev[-1] + integral) / u)
    return grid, np.stack(pieces)


def omega_exact_ode(u: float) -> float:
    """omega(u) from the delay equation, for cross-checking the closed forms."""
    if u < 1.0:
        raise ValueError(f"omega is defined for u >= 1, got {u}")
    k = int(math.floor(u))
    grid, table = _ode_table(max(k, 4))
    row = table[k - 1]
    frac = u - k
    # cubic interpolation on the local 4-point stencil
    idx = max(min(int(frac * _ODE_STEPS), _ODE_STEPS - 3) - 1, 0)
    xs = grid[idx:idx + 4]
    ys = row[idx:idx + 4]
    return float(np.polyval(np.polyfit(xs - xs[0], ys, 3), frac - xs[0]))
