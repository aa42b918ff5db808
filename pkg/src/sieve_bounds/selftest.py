"""Fast invariant checks shared by `sieve-bounds selftest`."""

from __future__ import annotations

import math
from typing import Callable

import numpy as np

from . import bounds as bd
from .buchstab import LOWER_CONST, UPPER_CONST, BuchstabKind, omega_exact_ode, omega_piecewise
from .integrals import find_spec
from .quadrature import PRNG, integrate_mc
from .regions import RegionConfig, in_D_family, in_geometric, tables_for
from .sieve_params import alpha_star, gamma_is_stable, gamma_of_theta, nu

Check = tuple[str, bool, str]

# branch table for gamma on [0.52, 0.525): (upper end, slope, intercept, denominator)
GAMMA_TABLE = (
    (25 / 48, 4.0, -2.0, 1.0),
    (251 / 481, 44.0, -21.0, 23.0),
    (23 / 44, 120.0, -61.0, 19.0),
    (0.525, 4.0, -2.0, 1.0),
)


def gamma_table(theta: float, table=GAMMA_TABLE) -> float:
    for end, a, b, d in table:
        if theta < end:
            return (a * theta + b) / d
    raise ValueError("theta outside the tabulated range")


def _buchstab() -> list[Check]:
    ex = BuchstabKind.EXACT
    out = []
    out.append(("omega(2) = 1/2", abs(omega_piecewise(2.0, ex) - 0.5) < 1e-12, ""))
    w3 = (1 + math.log(2)) / 3
    out.append(("omega(3) = (1+ln 2)/3", abs(omega_piecewise(3.0, ex) - w3) < 1e-12, ""))
    jump2 = abs(omega_piecewise(2.0 - 1e-13, ex) - omega_piecewise(2.0, ex))
    jump3 = abs(omega_piecewise(3.0 - 1e-13, ex) - omega_piecewise(3.0, ex))
    out.append(("omega continuous at 2 and 3", max(jump2, jump3) < 1e-12, f"{max(jump2, jump3):.1e}"))
    env = all(omega_piecewise(u, BuchstabKind.LOWER) == LOWER_CONST
              and omega_piecewise(u, BuchstabKind.UPPER) == UPPER_CONST for u in (4.0, 5.5, 9.0))
    out.append(("envelope constants for u >= 4", env, ""))
    dev = max(abs(omega_piecewise(u, ex) - omega_exact_ode(u)) for u in np.linspace(1.0, 3.99, 40))
    out.append(("closed form matches delay equation", dev < 1e-8, f"{dev:.1e}"))
    return out


def _params(rng: np.random.Generator, table) -> list[Check]:
    grid = np.linspace(0.52, 0.525, 50, endpoint=False)
    dev = max(abs(gamma_of_theta(th) - gamma_table(th, table)) for th in grid)
    out = [("gamma matches the branch table", dev < 1e-12, f"{dev:.1e}"),
           ("gamma stable under doubling g_max", all(gamma_is_stable(th) for th in grid[::7]), "")]
    th = rng.uniform(0.505, 0.535, 2000)
    al = rng.uniform(0.0, 0.5, 2000)
    nu_ok = all(nu(t, a) >= 2 * t - 1 - 1e-15 for t, a in zip(th, al))
    st_ok = all(1 - t - 1e-12 <= alpha_star(t, a) <= 0.5 + 1e-9 for t, a in zip(th, al))
    out.append(("nu(alpha) >= 2 theta - 1", nu_ok, ""))
    out.append(("1 - theta <= alpha* <= 1/2", st_ok, ""))
    return out


def _regions(rng: np.random.Generator, config: RegionConfig) -> list[Check]:
    out = []
    n = 2000
    for theta in (0.52, 0.524):
        tb = tables_for(theta, config)
        pts = rng.uniform(0.0, 0.5, (n, 2))
        pts = pts[pts.sum(axis=1) < 1.0]
        dual = all(in_geometric(tb, (a, b), "A") == in_geometric(tb, (1 - a - b, b), "B")
                   for a, b in pts if 0 < 1 - a - b < 1)
        split_a = all(in_geometric(tb, p, "A") == (in_geometric(tb, p, "A1") ^ in_geometric(tb, p, "A2"))
                      for p in pts)
        split_b = all(in_geometric(tb, p, "B") == (in_geometric(tb, p, "B1") ^ in_geometric(tb, p, "B2"))
                      for p in pts)
        out.append((f"A/B duality (theta={theta})", dual, ""))
        out.append((f"A = A1 + A2 and B = B1 + B2 (theta={theta})", split_a and split_b, ""))
        trip = rng.uniform(0.0, 0.5, (n, 3))
        prim = all((not in_D_family(tb, t[:2], "D0p") or in_D_family(tb, t[:2], "D0"))
                   and (not in_D_family(tb, t, "D1p") or in_D_family(tb, t, "D1"))
                   and (not in_D_family(tb, t, "D2p") or in_D_family(tb, t, "D2")) for t in trip)
        out.append((f"primed sets inside unprimed (theta={theta})", prim, ""))
    h_empty = []
    for theta in (0.52, 0.523, 0.524):
        tb = tables_for(theta, config)
        hit = any(in_geometric(tb, (x,), "H") for x in np.linspace(0.001, 0.499, 4000))
        h_empty.append(hit == (theta <= 11 / 21))
    out.append(("H empty exactly for theta > 11/21", all(h_empty), ""))
    return out


def _consistency() -> list[Check]:
    out = []
    for i, th in enumerate(bd.REFERENCE_THETAS):
        res = bd.consistency_check(i)
        bad = [k for k, v in res.items() if not v[2]]
        out.append((f"table consistency sums (theta={th})", not bad, ", ".join(bad)))
    return out


def _mc(config: RegionConfig) -> list[Check]:
    spec = find_spec(0.52, "UC01", config)
    a = integrate_mc(spec, 2**14, 5, PRNG, threads=1)
    b = integrate_mc(spec, 2**14, 5, PRNG, threads=1)
    c = integrate_mc(spec, 2**14, 5, PRNG, threads=2)
    return [("MC seeded determinism", a.value == b.value, ""),
            ("MC parallel/serial bit-equality", a.value == c.value, "")]


def run_selftest(config: RegionConfig | None = None, fault: str | None = None,
                 seed: int = 20240214) -> list[Check]:
    config = config or RegionConfig()
    rng = np.random.default_rng(seed)
    table = GAMMA_TABLE
    if fault == "gamma":
        # deliberately corrupted constant, to prove the check can fail
        table = ((25 / 48, 4.0, -2.0, 1.0), (251 / 481, 45.0, -21.0, 23.0)) + GAMMA_TABLE[2:]
    suites: list[Callable[[], list[Check]]] = [
        _buchstab,
        lambda: _params(rng, table),
        lambda: _regions(rng, config),
        _consistency,
        lambda: _mc(config),
    ]
    results: list[Check] = []
    for suite in suites:
        results.extend(suite())
    return results
