import math

import numpy as np
import pytest

from sieve_bounds.buchstab import (
    LOWER_CONST,
    SIMPLE_CONST,
    UPPER_CONST,
    BuchstabKind,
    j_fast,
    j_integral,
    omega_exact_ode,
    omega_kernel,
    omega_piecewise,
)

EX, LO, UP, SU = BuchstabKind.EXACT, BuchstabKind.LOWER, BuchstabKind.UPPER, BuchstabKind.SIMPLE_UPPER


def simpson(f, a, b, panels):
    # composite Simpson with an even panel count, vectorized
    x = np.linspace(a, b, panels + 1)
    y = f(x)
    h = (b - a) / panels
    return h / 3 * (y[0] + y[-1] + 4 * y[1:-1:2].sum() + 2 * y[2:-1:2].sum())


def j_oracle(u):
    return simpson(lambda t: np.log(t - 1) / t, 2.0, u - 1.0, 10**6)


def test_piecewise_examples():
    assert omega_piecewise(1.5, LO) == pytest.approx(2 / 3, abs=1e-15)
    assert omega_piecewise(2.5, UP) == pytest.approx((1 + math.log(1.5)) / 2.5, abs=1e-15)
    assert omega_piecewise(5.0, LO) == 0.5612
    assert omega_piecewise(5.0, UP) == 0.5617
    assert omega_piecewise(10.0, SU) == 0.5672


def test_closed_form_values_and_continuity():
    assert abs(omega_piecewise(2.0, EX) - 0.5) < 1e-12
    assert abs(omega_piecewise(3.0, EX) - (1 + math.log(2)) / 3) < 1e-12
    for u in (2.0, 3.0):
        left = omega_piecewise(u - 1e-13, EX)
        assert abs(left - omega_piecewise(u, EX)) < 1e-12


def test_domain_errors():
    with pytest.raises(ValueError):
        omega_piecewise(0.99, UP)
    with pytest.raises(ValueError):
        omega_piecewise(4.5, EX)
    with pytest.raises(ValueError):
        j_integral(2.9)
    with pytest.raises(ValueError):
        j_integral(4.0)


def test_j_integral_against_simpson():
    assert j_integral(3.0) == 0.0
    for u in (3.5, 4.0 - 1e-9):
        assert j_integral(u) == pytest.approx(j_oracle(u), abs=1e-12)


def test_compiled_j_matches_quad():
    for u in np.linspace(3.0, 3.999, 50):
        assert abs(j_fast(u) - j_integral(u)) < 1e-13


def test_compiled_kernel_matches_python():
    rng = np.random.default_rng(1)
    for u in rng.uniform(1.0, 12.0, 500):
        for kind in (LO, UP, SU):
            assert omega_kernel(u, int(kind)) == pytest.approx(omega_piecewise(u, kind), abs=1e-13)
    assert math.isnan(omega_kernel(0.5, 1))


def test_ode_matches_closed_form_on_grid():
    grid = np.linspace(1.0, 4.0, 1000, endpoint=False)
    dev = max(abs(omega_exact_ode(u) - omega_piecewise(u, EX)) for u in grid)
    assert dev < 1e-9


def test_ode_examples():
    assert omega_exact_ode(2.0) == pytest.approx(0.5, abs=1e-12)
    assert omega_exact_ode(3.0) == pytest.approx((1 + math.log(2)) / 3, abs=1e-10)
    assert LOWER_CONST <= omega_exact_ode(6.0) <= UPPER_CONST


def test_limit_at_four_inside_envelope():
    v = omega_piecewise(4.0 - 1e-12, EX)
    assert LOWER_CONST <= v <= UPPER_CONST


def test_envelope_ordering_random():
    rng = np.random.default_rng(7)
    for u in rng.uniform(1.0, 20.0, 10**4):
        lo, up, su = (omega_kernel(u, k) for k in (1, 2, 3))
        assert lo <= up <= su
        if u < 4.0:
            ex = omega_kernel(u, 0)
            assert lo == ex == up
    assert SIMPLE_CONST > UPPER_CONST
