import itertools

import numpy as np
import pytest

from sieve_bounds.regions import (
    COMPOSITE_ARITY,
    G3_ROWS,
    G4_ROWS,
    G5_ROWS,
    REGION_IDS,
    RegionConfig,
    in_composite,
    in_D_family,
    in_G,
    in_G2,
    in_G3_direct,
    in_G4_direct,
    in_G5_direct,
    in_geometric,
    in_region,
    partition_lift,
    region_arity,
    tables_for,
)


# ---------------------------------------------------------------------------
# independent oracle for the three-prime asymptotic set
# ---------------------------------------------------------------------------

def rows_oracle(a1, a2, a3, a4, theta):
    k = 1 - theta
    rows = [
        a1 >= k and a2 >= k / 2 and a3 >= k / 4 and a4 >= 2 * k / 7,
        a1 >= k and a2 >= k / 2 and a3 >= k / 3 and a4 >= 2 * k / 11,
        a1 >= k and a2 >= k / 3 and 1 - a1 - a2 + a3 >= k and a4 >= 2 * k / 5,
        a1 >= k and a2 <= k / 3 and a3 <= k / 3 and a2 + a3 >= 4 * k / 7 and 1 - a1 >= 14 * k / 13,
    ]
    return any(rows)


def system_oracle(a1, a2, a3, a4, theta):
    k = 1 - theta
    h, g1, g2, g3, k1, k2, v = 1, 1, 2, 3, 0, 0, 1
    for d in (4, 5):
        e = 1 / (2 * d)
        u = 1 - e
        b1, c1 = 1 / 3 - e, 1 / 6
        a2_, c2 = 7 / 12 - e, 1 / 6
        for (b3, c3), (a4_, c4), (a5, b5, c5), (a6, b6, c6) in itertools.product(
            [(1 / 3 - e, 1 / 6), (1 / 4, 1 / 4 - e)],
            [(1 / 2, 1 / 4 - e), (7 / 12 - e, 1 / 6)],
            [(1 / 2, 1 / 3 - e, 1 / 6), (7 / 12 - e, 1 / 4, 1 / 6)],
            [(1 / 2, 1 / 4, 1 / 4 - e), (7 / 12 - e, 1 / 4, 1 / 6), (1 / 2, 1 / 3 - e, 1 / 6)],
        ):
            w = u - h / (2 * g1) - h / (2 * g2)
            conds = [
                a4 >= k / d,
                a2 * (h / 4 + g2 * b1 / 2) + a3 * (-g3 * c1 / 2 + h / 4 - h * k1 / (4 * g1) + k2 * b1 / 2) > b1 * k,
                a1 * (h / 4 + g1 * a2_ / 2) + a3 * (-g3 * c2 / 2 + h / 4 - h * k2 / (4 * g2) + k1 * a2_ / 2) > a2_ * k,
                a2 * (h / 4 + g2 * b3 / 2) + a3 * (g3 * c3 / 2 + h / 4 - h * k1 / (4 * g1) + k2 * b3 / 2) > (u - h / (2 * g1)) * k,
                a1 * (h / 4 + g1 * a4_ / 2) + a3 * (g3 * c4 / 2 + h / 4 - h * k2 / (4 * g2) + k1 * a4_ / 2) > (u - h / (2 * g2)) * k,
                a1 * (h / 4 + g1 * a5 / 2) + a2 * (h / 4 + g2 * b5 / 2)
                + a3 * (-g3 * c5 / 2 + h / 4 + k1 * a5 / 2 + k2 * b5 / 2) > (a5 + b5) * k,
                a1 * (h / 4 + g1 * a6 / 2) + a2 * (h / 4 + g2 * b6 / 2)
                + a3 * (g3 * c6 / 2 + h / 4 + k1 * a6 / 2 + k2 * b6 / 2) > u * k,
                a3 * (g3 * w / 2 + h * v / 4) > w * k,
            ]
            if all(conds):
                return True
    return False


def g3_oracle(t, theta):
    a1, a2, a3 = t
    a4 = 1 - a1 - a2 - a3
    return rows_oracle(a1, a2, a3, a4, theta) or system_oracle(a1, a2, a3, a4, theta)


def test_g2_examples(tb52):
    assert in_G2(tb52, 0.48, 0.46)
    assert not in_G2(tb52, 0.30, 0.25)
    assert not in_G2(tb52, 0.50, 0.40)
    assert in_region(tb52, (0.48, 0.46), "G2")


def test_g3_examples(tb52):
    # frozen from the oracle: no row and none of the 48 parameter choices holds
    assert g3_oracle((0.49, 0.25, 0.13), 0.52) is False
    assert not in_G3_direct(tb52, (0.49, 0.25, 0.13))
    assert g3_oracle((0.49, 0.25, 0.17), 0.52) is True
    assert in_G3_direct(tb52, (0.49, 0.25, 0.17))
    assert not in_G3_direct(tb52, (0.2, 0.1, 0.05))
    # remainder nearly 0: every row needs a positive remainder threshold
    assert not in_G3_direct(tb52, (0.49, 0.26, 0.25 - 1e-12))


def test_g3_against_oracle(tb52, tb524):
    rng = np.random.default_rng(11)
    hits = 0
    for tb, theta in ((tb52, 0.52), (tb524, 0.524)):
        for _ in range(3000):
            a1 = rng.uniform(0.45, 0.6)
            a2 = rng.uniform(0.05, 0.3)
            a3 = rng.uniform(0.02, 0.22)
            if a1 + a2 + a3 >= 1:
                continue
            want = g3_oracle((a1, a2, a3), theta)
            hits += want
            assert in_G3_direct(tb, (a1, a2, a3)) == want, (theta, a1, a2, a3)
    assert hits > 50


def test_table_sizes():
    assert len(G3_ROWS) == 2
    assert len(G4_ROWS) == 9
    assert len(G5_ROWS) == 87


def test_g4_examples(tb52):
    k = 0.48
    t = (0.49, 0.25, 0.17, 0.07)
    rem = 1 - sum(t)
    assert t[0] >= k and t[1] >= k / 2 and t[2] >= k / 3 and t[3] >= k / 7 and rem >= 2 * k / 83
    assert in_G4_direct(tb52, t)
    assert not in_G4_direct(tb52, (0.01, 0.01, 0.01, 0.01))
    with pytest.raises(ValueError):
        in_G4_direct(tb52, (0.5, 0.3, 0.2, 0.1))


def test_g5_tiny_tuple_false(tb52):
    assert not in_G5_direct(tb52, (0.01,) * 5)


def test_g_lift_contains_g2(tb52):
    # the lift may group the remainder, so anything in the direct band stays in G
    rng = np.random.default_rng(5)
    for _ in range(500):
        a = rng.uniform(0.4, 0.5)
        b = rng.uniform(0.3, 0.5)
        if a + b < 1 and in_G2(tb52, a, b):
            assert in_G(tb52, (a, b))


def test_g_roles_order():
    # grouping fewer factors can only shrink the set
    rng = np.random.default_rng(2)
    tbs = [tables_for(0.52, RegionConfig(g_roles=r)) for r in ("primes", "pair", "all")]
    for _ in range(400):
        t = rng.dirichlet(np.ones(5))[:4]
        if np.any(t <= 0.0):
            continue
        m = [in_G(tb, t) for tb in tbs]
        assert m[0] <= m[2] and m[1] <= m[2]


def test_config_validation():
    with pytest.raises(ValueError):
        RegionConfig(g_sets="bogus")
    with pytest.raises(ValueError):
        RegionConfig(g_roles="bogus")


def test_partition_lift_examples(tb52):
    assert partition_lift(tb52, (0.3, 0.2, 0.2, 0.1))
    assert not partition_lift(tb52, (0.45, 0.2, 0.1, 0.05, 0.05))
    assert partition_lift(tb52, (0.5, 0.25))
    assert in_D_family(tb52, (0.5, 0.25), "D0p")


def test_d0_cap(tb52):
    cap = 0.2816
    assert in_D_family(tb52, (0.0, cap - 1e-9), "D0")
    assert not in_D_family(tb52, (0.0, cap + 1e-9), "D0")


def test_d3(tb52, tb524):
    assert in_D_family(tb52, (0.4, 0.19), "D3")
    assert in_D_family(tb52, (0.33, 0.319), "D3")
    assert not in_D_family(tb52, (0.33, 0.321), "D3")
    # above 11/21 the third condition reduces to a2 < 1/3, implied by the other two
    rng = np.random.default_rng(4)
    for a1, a2 in rng.uniform(0.0, 0.5, (5000, 2)):
        want = a2 <= a1 and 2 * a1 + a2 < 1 and a2 < 1 / 3
        assert in_D_family(tb524, (a1, a2), "D3") == want


def test_arity_errors(tb52):
    with pytest.raises(ValueError):
        in_D_family(tb52, (0.1, 0.1), "D1")
    with pytest.raises(ValueError):
        in_geometric(tb52, (0.1,), "A")
    with pytest.raises(ValueError):
        in_composite(tb52, (0.1, 0.1), "UC01")
    with pytest.raises(ValueError):
        in_region(tb52, (0.1, 0.1), "NOPE")


def test_geometric_examples(tb52, tb524):
    assert in_geometric(tb52, (0.25, 0.25), "A")
    assert in_geometric(tb52, (0.33,), "H")
    assert in_geometric(tb52, (0.3201,), "H") and in_geometric(tb52, (0.3599,), "H")
    assert not in_geometric(tb52, (0.3199,), "H") and not in_geometric(tb52, (0.3601,), "H")
    assert not any(in_geometric(tb524, (x,), "H") for x in np.linspace(0.001, 0.499, 2000))


def test_region_ids_all_resolve(tb52):
    rng = np.random.default_rng(0)
    for name in REGION_IDS:
        n = region_arity(name)
        t = rng.dirichlet(np.ones(n + 1))[:n]
        assert isinstance(in_region(tb52, t, name), bool)


def test_composites_pure(tb52):
    rng = np.random.default_rng(9)
    for name, n in COMPOSITE_ARITY.items():
        for _ in range(20):
            t = rng.dirichlet(np.ones(n + 1))[:n] * 0.9
            a = in_composite(tb52, t, name)
            assert all(in_composite(tb52, t, name) == a for _ in range(3))


def test_region_grid_g2_band():
    from sieve_bounds.cli import region_grid

    rows = list(region_grid("G2", 0.52, 100, {}, lo=0.0, hi=0.5))
    assert len(rows) == 10**4
    for x, y, m in rows:
        if abs(abs(x - y) - 0.04) < 1e-9 or abs(x + y - 0.92) < 1e-9:
            continue    # float ties on the band edge
        assert m == int(abs(x - y) < 0.04 and x + y > 0.92)
