import numpy as np
import pytest

from sieve_bounds.sieve_params import (
    ThetaParams,
    alpha_star,
    gamma_g,
    gamma_is_stable,
    gamma_of_theta,
    interval_index,
    nu,
)


def gamma_scan(theta, gmax=64):
    # independent direct scan of the three-way minimum
    best = -1.0
    for g in range(1, gmax + 1):
        v = min(4 * theta - 2, ((8 * g - 4) * theta - (4 * g - 3)) / (4 * g - 1),
                (24 * g * theta - (12 * g + 1)) / (4 * g - 1))
        best = max(best, v)
    return best


def test_gamma_g_examples():
    assert gamma_g(0.52, 6) == pytest.approx(0.08, abs=1e-15)
    assert gamma_g(0.521, 6) == pytest.approx((44 * 0.521 - 21) / 23, abs=1e-15)
    assert gamma_g(0.522, 5) == pytest.approx((120 * 0.522 - 61) / 19, abs=1e-15)
    with pytest.raises(ValueError):
        gamma_g(0.52, 0)


def test_gamma_of_theta_examples():
    assert gamma_of_theta(0.52) == pytest.approx(0.08, abs=1e-15)
    assert gamma_of_theta(0.524) == pytest.approx(0.096, abs=1e-15)
    # 0.5215 lies in [25/48, 251/481), so the scan lands on (44 theta - 21)/23
    want = gamma_scan(0.5215)
    assert want == pytest.approx((44 * 0.5215 - 21) / 23, abs=1e-15)
    assert gamma_of_theta(0.5215) == pytest.approx(want, abs=1e-15)


def test_gamma_piecewise_table():
    def table(th):
        if th < 25 / 48:
            return 4 * th - 2
        if th < 251 / 481:
            return (44 * th - 21) / 23
        if th < 23 / 44:
            return (120 * th - 61) / 19
        return 4 * th - 2

    for th in np.linspace(0.52, 0.525, 50, endpoint=False):
        assert abs(gamma_of_theta(th) - table(th)) < 1e-12
        assert gamma_is_stable(th)


def test_theta_range():
    with pytest.raises(ValueError):
        ThetaParams(0.6)
    p = ThetaParams(0.52)
    assert p.nu0 == pytest.approx(0.04)
    assert p.gamma == pytest.approx(0.08)


def test_interval_index_examples():
    assert interval_index(0.52, 0.49) == 1
    assert interval_index(0.52, 0.0) == 13
    assert interval_index(0.52, 0.5 - 1e-12) == 1
    with pytest.raises(ValueError):
        interval_index(0.52, 0.6)


def test_interval_index_partition():
    # I_h = [1/2 - 2h(theta - 1/2), 1/2 - (2h - 2)(theta - 1/2)) abut without gaps
    th = 0.52
    d = th - 0.5
    for h in range(1, 13):
        lo = 0.5 - 2 * h * d
        assert interval_index(th, lo) == h
        assert interval_index(th, lo + 2 * d - 1e-9) == h
        assert interval_index(th, lo - 1e-9) == h + 1


def test_nu_examples():
    assert nu(0.52, 0.49) == pytest.approx(0.06, abs=1e-14)
    assert nu(0.52, 0.0) == pytest.approx(1.04 / 25, abs=1e-14)


def test_alpha_star_examples():
    assert alpha_star(0.52, 0.0) == pytest.approx(0.4992, abs=1e-14)
    assert alpha_star(0.52, 0.48) == pytest.approx(0.48, abs=1e-14)


def test_random_bounds():
    rng = np.random.default_rng(3)
    thetas = rng.uniform(0.505, 0.535, 1000)
    gammas = [gamma_of_theta(t) for t in thetas]
    idx = rng.integers(0, thetas.size, 10**5)
    al = rng.uniform(0.0, 0.5, 10**5)
    for i, a in zip(idx, al):
        t = thetas[i]
        assert nu(t, a, gammas[i]) >= 2 * t - 1 - 1e-15
        assert 1 - t - 1e-12 <= alpha_star(t, a) <= 0.5 + 1e-9
