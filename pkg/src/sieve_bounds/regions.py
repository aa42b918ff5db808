"""Region membership: asymptotic sets G, decomposition sets D, geometric regions and
the composite indicators that cut out each loss integral.

Every predicate has a compiled kernel (used by the integrators) and a thin Python
wrapper.  Kernels read theta-dependent constants from a ``RegionTables`` pack.

Exponent tuples are ordered: t[0] is the outermost variable and the implicit
remainder is 1 - sum(t).
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np
from numba import njit

from .sieve_params import ThetaParams, alpha_star_nb, nu_nb

# ---------------------------------------------------------------------------
# Tables of the asymptotic-formula lemmas
# ---------------------------------------------------------------------------

# Four-factor rows: L1 >= k, L2 >= k/2, L3 >= k/a, L4 >= 2k/b   (k = 1 - theta)
G3_ROWS = ((4, 7), (3, 11))

# Five-factor rows: (a, b, c) -> L3 >= k/a, L4 >= k/b, rem >= 2k/c
G4_ROWS = (
    (3, 7, 83), (3, 8, 47), (3, 9, 35), (3, 10, 29), (3, 12, 23),
    (4, 5, 39), (4, 6, 23), (4, 8, 15), (5, 5, 19),
)

# Six-factor rows: (a, b, c, d) -> L3 >= k/a, L4 >= k/b, L5 >= k/c, rem >= 2k/d
G5_ROWS = (
    (3, 7, 43, 3611), (3, 7, 44, 1847), (3, 7, 45, 1259), (3, 7, 46, 965),
    (3, 7, 48, 671), (3, 7, 49, 587), (3, 7, 51, 475), (3, 7, 54, 377),
    (3, 7, 56, 335), (3, 7, 60, 279), (3, 7, 63, 251), (3, 7, 70, 209),
    (3, 7, 78, 181), (3, 7, 84, 167),
    (3, 8, 25, 1199), (3, 8, 26, 623), (3, 8, 27, 431), (3, 8, 28, 335),
    (3, 8, 30, 239), (3, 8, 32, 191), (3, 8, 33, 175), (3, 8, 36, 143),
    (3, 8, 40, 119), (3, 8, 42, 111), (3, 8, 48, 95),
    (3, 9, 19, 683), (3, 9, 20, 359), (3, 9, 21, 251), (3, 9, 22, 197),
    (3, 9, 24, 143), (3, 9, 27, 107), (3, 9, 30, 89), (3, 9, 36, 71),
    (3, 10, 16, 479), (3, 10, 18, 179), (3, 10, 20, 119), (3, 10, 24, 79),
    (3, 10, 30, 59),
    (3, 11, 14, 461), (3, 11, 15, 219), (3, 11, 22, 65),
    (3, 12, 13, 311), (3, 12, 14, 167), (3, 12, 15, 119), (3, 12, 16, 95),
    (3, 12, 18, 71), (3, 12, 20, 59), (3, 12, 21, 55),
    (3, 13, 13, 155), (3, 14, 15, 69), (3, 14, 21, 41), (3, 15, 15, 59),
    (3, 15, 20, 39),
    (4, 5, 21, 839), (4, 5, 22, 439), (4, 5, 24, 239), (4, 5, 25, 199),
    (4, 5, 28, 139), (4, 5, 30, 119), (4, 5, 36, 89), (4, 5, 40, 79),
    (4, 6, 13, 311), (4, 6, 14, 167), (4, 6, 15, 119), (4, 6, 16, 95),
    (4, 6, 18, 71), (4, 6, 20, 59), (4, 6, 21, 55), (4, 6, 24, 47),
    (4, 7, 10, 279), (4, 7, 14, 55), (4, 8, 9, 143), (4, 8, 10, 79),
    (4, 8, 16, 31), (4, 9, 9, 71),
    (5, 5, 11, 219), (5, 5, 12, 119), (5, 5, 14, 69), (5, 5, 15, 59),
    (5, 6, 8, 239), (5, 6, 9, 89), (5, 6, 10, 59), (5, 6, 15, 29),
    (5, 7, 7, 139), (6, 7, 7, 41), (6, 9, 9, 17), (7, 7, 7, 27),
)

# Lemma bit flags used by the G-set configuration.
L_PAIR = 1      # two-factor Type-II condition (|m - n| < nu0, m + n > 1 - gamma)
L_ROWS4 = 2     # four-factor rows
L_SYS4 = 4      # four-factor parametric system (48 parameter choices)
L_ROWS5 = 8     # five-factor rows
L_ROWS6 = 16    # six-factor rows

G_SETS_PUBLISHED = "published"
G_SETS_FULL = "full"

# which factors a G-lift may group: the primes only (remainder pinned to the cofactor role),
# the remainder as a free item in the two-factor condition only, or everywhere
G_ROLES_PRIMES = "primes"
G_ROLES_PAIR = "pair"
G_ROLES_ALL = "all"
G_ROLES = (G_ROLES_PRIMES, G_ROLES_PAIR, G_ROLES_ALL)


def _lemma33_system(theta: float) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Coefficients of the 7 strict inequalities on (L1, L2, L3) plus the d of L4 >= k/d."""
    k = 1.0 - theta
    h, g1, g2, g3, k1, k2, v = 1.0, 1.0, 2.0, 3.0, 0.0, 0.0, 1.0
    coefs, rhs, ds = [], [], []
    for d in (4, 5):
        e = 1.0 / (2 * d)
        u = 1.0 - e
        b1, c1 = 1.0 / 3 - e, 1.0 / 6
        a2, c2 = 7.0 / 12 - e, 1.0 / 6
        for b3, c3 in ((1.0 / 3 - e, 1.0 / 6), (0.25, 0.25 - e)):
            for a4, c4 in ((0.5, 0.25 - e), (7.0 / 12 - e, 1.0 / 6)):
                for a5, b5, c5 in ((0.5, 1.0 / 3 - e, 1.0 / 6), (7.0 / 12 - e, 0.25, 1.0 / 6)):
                    for a6, b6, c6 in (
                        (0.5, 0.25, 0.25 - e),
                        (7.0 / 12 - e, 0.25, 1.0 / 6),
                        (0.5, 1.0 / 3 - e, 1.0 / 6),
                    ):
                        s = u - h / (2 * g1) - h / (2 * g2)
                        c = [
                            [0.0, h / 4 + g2 * b1 / 2, -g3 * c1 / 2 + h / 4 - h * k1 / (4 * g1) + k2 * b1 / 2],
                            [h / 4 + g1 * a2 / 2, 0.0, -g3 * c2 / 2 + h / 4 - h * k2 / (4 * g2) + k1 * a2 / 2],
                            [0.0, h / 4 + g2 * b3 / 2, g3 * c3 / 2 + h / 4 - h * k1 / (4 * g1) + k2 * b3 / 2],
                            [h / 4 + g1 * a4 / 2, 0.0, g3 * c4 / 2 + h / 4 - h * k2 / (4 * g2) + k1 * a4 / 2],
                            [h / 4 + g1 * a5 / 2, h / 4 + g2 * b5 / 2, -g3 * c5 / 2 + h / 4 + k1 * a5 / 2 + k2 * b5 / 2],
                            [h / 4 + g1 * a6 / 2, h / 4 + g2 * b6 / 2, g3 * c6 / 2 + h / 4 + k1 * a6 / 2 + k2 * b6 / 2],
                            [0.0, 0.0, g3 * s / 2 + h * v / 4],
                        ]
                        r = [
                            b1 * k,
                            a2 * k,
                            (u - h / (2 * g1)) * k,
                            (u - h / (2 * g2)) * k,
                            (a5 + b5) * k,
                            u * k,
                            s * k,
                        ]
                        coefs.append(c)
                        rhs.append(r)
                        ds.append(float(d))
    return np.array(coefs), np.array(rhs), np.array(ds)


def _g_masks(mode: str) -> np.ndarray:
    """Lemma bit set allowed for G_n, indexed by n (number of prime variables)."""
    full = L_PAIR | L_ROWS4 | L_SYS4 | L_ROWS5 | L_ROWS6
    m = np.zeros(9, dtype=np.int64)
    if mode == G_SETS_FULL:
        m[2:] = full
    elif mode == G_SETS_PUBLISHED:
        # the published computation skipped the five/six-factor rows everywhere, the parametric
        # system for sums of 6 or more factors and the four-factor rows for 8 or more;
        # a tuple of n primes plus its remainder has n + 1 factors
        m[2] = L_PAIR
        m[3:5] = L_PAIR | L_ROWS4 | L_SYS4
        m[5:7] = L_PAIR | L_ROWS4
        m[7:] = L_PAIR
    else:
        raise ValueError(f"unknown g_sets mode {mode!r}")
    return m


# P vector layout
P_THETA, P_NU0, P_GAMMA, P_K, P_DEXT, P_ROLES, P_EQ13, P_NU_AT0 = range(8)
P_SIZE = 8


@dataclass(frozen=True)
class RegionConfig:
    dstar_extended: bool = True
    eq13_bound_as_printed: bool = True
    g_sets: str = G_SETS_PUBLISHED
    g_roles: str = G_ROLES_ALL

    def __post_init__(self):
        if self.g_sets not in (G_SETS_PUBLISHED, G_SETS_FULL):
            raise ValueError(f"unknown g_sets {self.g_sets!r}")
        if self.g_roles not in G_ROLES:
            raise ValueError(f"unknown g_roles {self.g_roles!r}")


class RegionTables:
    """Theta-dependent constants packed for the compiled predicates."""

    def __init__(self, params: ThetaParams, config: RegionConfig | None = None):
        self.params = params
        self.config = config or RegionConfig()
        th = params.theta
        k = 1.0 - th
        P = np.zeros(P_SIZE)
        P[P_THETA] = th
        P[P_NU0] = params.nu0
        P[P_GAMMA] = params.gamma
        P[P_K] = k
        P[P_DEXT] = 1.0 if self.config.dstar_extended else 0.0
        P[P_ROLES] = float(G_ROLES.index(self.config.g_roles))
        P[P_EQ13] = 1.0 if self.config.eq13_bound_as_printed else 0.0
        P[P_NU_AT0] = nu_nb(th, params.gamma, 0.0)
        c33, r33, d33 = _lemma33_system(th)
        g4 = np.array([[k, k / 2, k / a, k / b, 2 * k / c] for a, b, c in G4_ROWS])
        g5 = np.array([[k, k / 2, k / a, k / b, k / c, 2 * k / d] for a, b, c, d in G5_ROWS])
        # per-role lower bounds valid for every row of a lemma (pruning only)
        lo = np.zeros((6, 6))
        pair_lo = (1.0 - params.gamma - params.nu0) / 2
        lo[1, :2] = pair_lo
        l1_sys = min(r33[:, 1] / c33[:, 1, 0])
        lo[2, 0] = min(k, l1_sys)
        lo[2, 1] = min(5 * k / 21, k / 3, min(r33[:, 0] / c33[:, 0, 1]))
        lo[4, :5] = g4.min(axis=0)
        lo[5, :6] = g5.min(axis=0)
        lo -= 1e-12
        lo[lo < 0] = 0.0
        self.P = P
        self.pack = (
            P,
            lo,
            c33,
            r33,
            d33,
            g4,
            g5,
            _g_masks(self.config.g_sets),
        )


# ---------------------------------------------------------------------------
# Compiled helpers
# ---------------------------------------------------------------------------


@njit(cache=True)
def _subset_sums(vals, n):
    out = np.zeros(1 << n)
    for mask in range(1, 1 << n):
        i = 0
        while not (mask >> i) & 1:
            i += 1
        out[mask] = out[mask ^ (1 << i)] + vals[i]
    return out


@njit(cache=True)
def _popcount(x):
    c = 0
    while x:
        x &= x - 1
        c += 1
    return c


@njit(cache=True)
def pair_lemma(m, n, P):
    return abs(m - n) < P[P_NU0] and m + n > 1.0 - P[P_GAMMA]


@njit(cache=True)
def rows4_lemma(l1, l2, l3, l4, P):
    k = P[P_K]
    if l1 < k:
        return False
    if l2 >= k / 2 and l3 >= k / 4 and l4 >= 2 * k / 7:
        return True
    if l2 >= k / 2 and l3 >= k / 3 and l4 >= 2 * k / 11:
        return True
    if l2 >= k / 3 and 1.0 - l1 - l2 + l3 >= k and l4 >= 2 * k / 5:
        return True
    if l2 <= k / 3 and l3 <= k / 3 and l2 + l3 >= 4 * k / 7 and 1.0 - l1 >= 14 * k / 13:
        return True
    return False


@njit(cache=True)
def sys4_lemma(l1, l2, l3, l4, P, c33, r33, d33):
    k = P[P_K]
    for c in range(c33.shape[0]):
        if l4 < k / d33[c]:
            continue
        ok = True
        for i in range(7):
            lhs = c33[c, i, 0] * l1 + c33[c, i, 1] * l2 + c33[c, i, 2] * l3
            if not lhs > r33[c, i]:
                ok = False
                break
        if ok:
            return True
    return False


@njit(cache=True)
def table_lemma(L, tab):
    # any row with L[j] >= tab[row, j] for all j
    for r in range(tab.shape[0]):
        ok = True
        for j in range(tab.shape[1]):
            if L[j] < tab[r, j]:
                ok = False
                break
        if ok:
            return True
    return False


@njit(cache=True)
def _eval_lemma(lemma, roles, P, c33, r33, d33, g4, g5):
    if lemma == 1:
        return pair_lemma(roles[0], roles[1], P)
    if lemma == 2:
        return rows4_lemma(roles[0], roles[1], roles[2], roles[3], P)
    if lemma == 3:
        return (rows4_lemma(roles[0], roles[1], roles[2], roles[3], P)
                or sys4_lemma(roles[0], roles[1], roles[2], roles[3], P, c33, r33, d33))
    if lemma == 4:
        return table_lemma(roles, g4)
    if lemma == 5:
        return table_lemma(roles, g5)
    return False


@njit(cache=True)
def _block_search(full, S, nblocks, lo_row, roles, lemma, tb):
    """Assign disjoint nonempty blocks of items to roles 0..nblocks-1, the last block
    taking every remaining item, and test the lemma on the resulting role values."""
    P, lo, c33, r33, d33, g4, g5, gmask = tb
    remv = np.zeros(8, dtype=np.int64)
    cur = np.zeros(8, dtype=np.int64)
    remv[0] = full
    cur[0] = full
    level = 0
    while level >= 0:
        rem = remv[level]
        if level == nblocks - 1:
            if rem != 0 and S[rem] >= lo_row[level]:
                roles[level] = S[rem]
                if _eval_lemma(lemma, roles, P, c33, r33, d33, g4, g5):
                    return True
            level -= 1
            continue
        need = nblocks - 1 - level
        sub = (cur[level] - 1) & rem
        while sub:
            if _popcount(rem ^ sub) >= need and S[sub] >= lo_row[level]:
                break
            sub = (sub - 1) & rem
        if sub == 0:
            level -= 1
            continue
        cur[level] = sub
        roles[level] = S[sub]
        remv[level + 1] = rem ^ sub
        cur[level + 1] = rem ^ sub
        level += 1
    return False


@njit(cache=True)
def _lemma_roles(lemma):
    if lemma == 1:
        return 2
    if lemma <= 3:
        return 4
    if lemma == 4:
        return 5
    return 6


@njit(cache=True)
def g_lift_lemma(vals, lemma, tb):
    """Can the tuple be grouped into blocks satisfying one lemma?"""
    P = tb[0]
    lo = tb[1]
    n = vals.shape[0]
    r = 1.0
    for i in range(n):
        r -= vals[i]
    nroles = _lemma_roles(lemma)
    roles = np.zeros(6)
    lo_row = lo[2] if lemma == 3 else lo[lemma]
    mode = int(P[P_ROLES] + 0.5)
    if mode == 2 or (mode == 1 and lemma == 1):
        # the remainder is one more factor; every factor joins exactly one block
        items = np.empty(n + 1)
        items[:n] = vals
        items[n] = r
        S = _subset_sums(items, n + 1)
        full = (1 << (n + 1)) - 1
        # the pair condition needs a third nonempty block for the cofactor
        nb = 3 if lemma == 1 else nroles
        if nb > n + 1:
            return False
        return _block_search(full, S, nb, lo_row, roles, lemma, tb)
    S = _subset_sums(vals, n)
    full = (1 << n) - 1
    nb = 2 if lemma == 1 else nroles - 1
    if nb > n:
        return False
    if lemma != 1:
        roles[nroles - 1] = r
    return _block_search(full, S, nb, lo_row, roles, lemma, tb)


@njit(cache=True)
def in_g(vals, tb):
    """Membership of an n-tuple in G_n (2 <= n <= 8), by grouping into any admissible lemma."""
    n = vals.shape[0]
    gmask = tb[7]
    allowed = gmask[min(n, 8)]
    if allowed & L_PAIR and g_lift_lemma(vals, 1, tb):
        return True
    if allowed & L_SYS4:
        if g_lift_lemma(vals, 3, tb):
            return True
    elif allowed & L_ROWS4:
        if g_lift_lemma(vals, 2, tb):
            return True
    if allowed & L_ROWS5 and g_lift_lemma(vals, 4, tb):
        return True
    if allowed & L_ROWS6 and g_lift_lemma(vals, 5, tb):
        return True
    return False


# --- decomposition sets ----------------------------------------------------


@njit(cache=True)
def d0_ok(m, n, P):
    if not (0.0 <= m <= 0.5 and n >= 0.0):
        return False
    th = P[P_THETA]
    ms = alpha_star_nb(th, m)
    return n <= min((3 * th + 1 - 4 * ms) / 2, (3 + th - 4 * ms) / 5)


@njit(cache=True)
def d1_ok(m, n, h, P):
    if not 0.0 <= m <= 0.5:
        return False
    th = P[P_THETA]
    ms = alpha_star_nb(th, m)
    return (h <= (1 + 3 * th) / 4 - ms and 2 * n + h <= 1 + th - 2 * ms
            and 2 * n + 3 * h <= (3 + th) / 2 - 2 * ms)


@njit(cache=True)
def d2_ok(m, n, h, P):
    if not 0.0 <= m <= 0.5:
        return False
    th = P[P_THETA]
    ms = alpha_star_nb(th, m)
    return n <= (1 - th) / 2 and h <= (1 + 3 * th - 4 * ms) / 8


@njit(cache=True)
def d0p_ok(m, n, P):
    th = P[P_THETA]
    return 0.0 <= m <= 0.5 and 0.0 <= n <= min((3 * th - 1) / 2, (1 + th) / 5)


@njit(cache=True)
def d1p_ok(m, n, h, P):
    th = P[P_THETA]
    return (0.0 <= m <= 0.5 and h <= (3 * th - 1) / 4 and 2 * n + h <= th
            and 2 * n + 3 * h <= (1 + th) / 2)


@njit(cache=True)
def d2p_ok(m, n, h, P):
    th = P[P_THETA]
    return 0.0 <= m <= 0.5 and n <= (1 - th) / 2 and h <= (3 * th - 1) / 8


@njit(cache=True)
def d_lift(vals, primed, dup_ext, P):
    """Partition into (m, n) in D0 or (m, n, h) in D1 u D2 (primed variants if asked).

    dup_ext: the last two items are copies of one coordinate; also accept an unprimed
    D0 pair with m < n or with at least one copy in the n block.
    """
    k = vals.shape[0]
    S = _subset_sums(vals, k)
    full = (1 << k) - 1
    copies = 0
    if dup_ext:
        copies = (1 << (k - 1)) | (1 << (k - 2))
    mm = full
    while mm:
        if mm != full:
            m = S[mm]
            if m <= 0.5:
                rest = full ^ mm
                nv = S[rest]
                if primed:
                    if d0p_ok(m, nv, P):
                        return True
                    if dup_ext and (m < nv or rest & copies) and d0_ok(m, nv, P):
                        return True
                elif d0_ok(m, nv, P):
                    return True
                nm = rest
                while nm:
                    if nm != rest:
                        a = S[nm]
                        b = S[rest ^ nm]
                        if primed:
                            if d1p_ok(m, a, b, P) or d2p_ok(m, a, b, P):
                                return True
                        elif d1_ok(m, a, b, P) or d2_ok(m, a, b, P):
                            return True
                    nm = (nm - 1) & rest
        mm = (mm - 1) & full
    return False


@njit(cache=True)
def dup_lift(vals, P):
    # append a copy of the last coordinate and lift into the primed sets
    k = vals.shape[0]
    w = np.empty(k + 1)
    w[:k] = vals
    w[k] = vals[k - 1]
    return d_lift(w, True, P[P_DEXT] > 0.5, P)


@njit(cache=True)
def d_dag(vals, P):
    return d_lift(vals, False, False, P)


@njit(cache=True)
def _reflect_first(vals):
    # (1 - sum, t2, ..., tn)
    w = vals.copy()
    w[0] = 1.0 - vals.sum()
    return w


@njit(cache=True)
def d_ddag(vals, P):
    return d_dag(vals, P) and d_dag(_reflect_first(vals), P)


@njit(cache=True)
def d_sharp(vals, P):
    return d_dag(vals, P) and d_dag(_reflect_first(vals), P)


@njit(cache=True)
def in_d3(a1, a2, P):
    th = P[P_THETA]
    return a2 <= a1 and 2 * a1 + a2 < 1.0 and a2 < 3.5 * th - 1.5


# --- geometric regions -----------------------------------------------------


@njit(cache=True)
def in_a(a1, a2):
    return 0.25 <= a1 <= 0.4 and (1 - a1) / 3 <= a2 <= min(a1, 1 - 2 * a1)


@njit(cache=True)
def in_b(a1, a2):
    return 1.0 / 3 <= a1 <= 0.5 and max(a1 / 2, 1 - 2 * a1) <= a2 <= (1 - a1) / 2


@njit(cache=True)
def in_c(a1, a2, P):
    if not (P[P_NU_AT0] <= a1 <= 0.5):
        return False
    if not (nu_nb(P[P_THETA], P[P_GAMMA], a1) <= a2 <= min(a1, (1 - a1) / 2)):
        return False
    return not (in_a(a1, a2) or in_b(a1, a2))


@njit(cache=True)
def in_a_prime(a1, a2):
    return in_a(a1, a2) and a1 + 3 * a2 < 1.005 and a1 >= 0.38


@njit(cache=True)
def _split(P):
    th = P[P_THETA]
    return min((3 * th - 1) / 2, (1 + th) / 5)


@njit(cache=True)
def in_a1(a1, a2, P):
    return in_a(a1, a2) and a2 < _split(P)


@njit(cache=True)
def in_a2(a1, a2, P):
    return in_a(a1, a2) and a2 >= _split(P)


@njit(cache=True)
def in_b1(a1, a2, P):
    return in_b(a1, a2) and a2 < _split(P)


@njit(cache=True)
def in_b2(a1, a2, P):
    return in_b(a1, a2) and a2 >= _split(P)


@njit(cache=True)
def in_h(a1, P):
    th = P[P_THETA]
    return 3.5 * th - 1.5 <= a1 <= 4 - 7 * th


@njit(cache=True)
def in_a1_prime(a1, a2, P):
    b = 1 - a1 - a2
    return in_b1(b, a2, P) and not in_h(b, P)


@njit(cache=True)
def in_a2_prime(a1, a2, P):
    b = 1 - a1 - a2
    return in_b2(b, a2, P) and not in_h(b, P)


# --- composite indicators --------------------------------------------------


@njit(cache=True)
def _box(t, P):
    nu0 = P[P_NU0]
    return nu0 <= t[0] < 0.5 and nu0 <= t[1] < min(t[0], (1 - t[0]) / 2)


@njit(cache=True)
def _chain(t, i, P):
    # nu0 <= t_i < min(t_{i-1}, (1 - t_1 - ... - t_{i-1}) / 2)
    s = 0.0
    for j in range(i):
        s += t[j]
    return P[P_NU0] <= t[i] < min(t[i - 1], (1 - s) / 2)


@njit(cache=True)
def _above(t, i, P):
    # t_{i-1} < t_i < (1 - t_1 - ... - t_{i-1}) / 2
    s = 0.0
    for j in range(i):
        s += t[j]
    return t[i - 1] < t[i] < (1 - s) / 2


@njit(cache=True)
def _pre(t, n):
    return t[:n].copy()


@njit(cache=True)
def _tup(first, t, idx):
    # (first, t[idx[0]], t[idx[1]], ...)
    w = np.empty(len(idx) + 1)
    w[0] = first
    for j in range(len(idx)):
        w[j + 1] = t[idx[j]]
    return w


@njit(cache=True)
def _head_c(t, tb):
    # shared prefix of the lower-side C family
    P = tb[0]
    return (_box(t, P) and in_c(t[0], t[1], P) and not in_g(_pre(t, 2), tb)
            and _chain(t, 2, P) and not in_g(_pre(t, 3), tb))


@njit(cache=True)
def _part3(t, P):
    return d_dag(_pre(t, 3), P)


@njit(cache=True)
def _ua_head(t, tb):
    P = tb[0]
    return (_box(t, P) and in_a_prime(t[0], t[1]) and _chain(t, 2, P)
            and not in_g(_pre(t, 3), tb))


@njit(cache=True)
def _vc_head(t, tb):
    P = tb[0]
    return (_box(t, P) and not in_h(t[0], P) and in_c(t[0], t[1], P)
            and _chain(t, 2, P) and not in_g(_pre(t, 3), tb))


@njit(cache=True)
def _va_head(t, tb, primed_family):
    P = tb[0]
    if not _box(t, P):
        return False
    if primed_family:
        if not in_a1_prime(t[0], t[1], P):
            return False
    elif in_h(t[0], P) or not in_a1(t[0], t[1], P):
        return False
    return _chain(t, 2, P) and not in_g(_pre(t, 3), tb)


@njit(cache=True)
def _rem(t, n):
    s = 1.0
    for j in range(n):
        s -= t[j]
    return s


@njit(cache=True)
def composite(pid, t, tb):
    P = tb[0]
    nu0 = P[P_NU0]
    # ---- lower side, region A
    if pid == 0:  # UA1
        return _box(t, P) and in_a(t[0], t[1]) and not in_a_prime(t[0], t[1])
    if pid <= 3:  # UA2, UA3, UA4 share the D-decomposable prefix
        if not (_ua_head(t, tb) and _part3(t, P) and _chain(t, 3, P)
                and not in_g(_pre(t, 4), tb)):
            return False
        if pid == 1:
            return not dup_lift(_pre(t, 4), P)
        if pid == 2:
            return (not dup_lift(_pre(t, 4), P) and _above(t, 4, P)
                    and in_g(_pre(t, 5), tb))
        return (dup_lift(_pre(t, 4), P) and _chain(t, 4, P) and not in_g(_pre(t, 5), tb)
                and _chain(t, 5, P) and not in_g(_pre(t, 6), tb))
    if pid == 4:  # UA5
        return (_ua_head(t, tb) and not _part3(t, P) and nu0 <= t[3] < t[0] / 2
                and not in_g(_tup(_rem(t, 3), t, (1, 2, 3)), tb))
    # ---- lower side, region C
    if 5 <= pid <= 11:
        if not (_head_c(t, tb) and _part3(t, P) and _chain(t, 3, P)
                and not in_g(_pre(t, 4), tb)):
            return False
        a4 = _pre(t, 4)
        star = dup_lift(a4, P)
        if pid == 5 or pid == 6:  # UC01, UC02
            if star or d_ddag(a4, P):
                return False
            if pid == 5:
                return True
            return _above(t, 4, P) and in_g(_pre(t, 5), tb)
        if pid == 7:  # UC03
            return (star and _chain(t, 4, P) and not in_g(_pre(t, 5), tb)
                    and _chain(t, 5, P) and not in_g(_pre(t, 6), tb)
                    and not dup_lift(_pre(t, 6), P))
        if pid == 9:  # UC05
            return (star and _chain(t, 4, P) and not in_g(_pre(t, 5), tb)
                    and _chain(t, 5, P) and not in_g(_pre(t, 6), tb)
                    and dup_lift(_pre(t, 6), P)
                    and _chain(t, 6, P) and not in_g(_pre(t, 7), tb)
                    and _chain(t, 7, P) and not in_g(_pre(t, 8), tb))
        # UC04, UC06, UC07: role reversal through gamma = 1 - t1 - ... - t5
        if star or not d_ddag(a4, P):
            return False
        if not (_chain(t, 4, P) and not in_g(_pre(t, 5), tb) and nu0 <= t[5] < t[0] / 2):
            return False
        g5 = _rem(t, 5)
        a6d = _tup(g5, t, (1, 2, 3, 4, 5))
        a6dp = _tup(t[0] - t[5], t, (1, 2, 3, 5, 4))
        if in_g(a6d, tb):
            return False
        in6 = dup_lift(a6d, P)
        if pid == 8:  # UC04
            return not in6 and not dup_lift(a6dp, P)
        if pid == 10:  # UC06
            if not in6:
                return False
            if not (nu0 <= t[6] < min(t[5], (t[0] - t[5]) / 2)):
                return False
            if in_g(_tup(g5, t, (1, 2, 3, 4, 5, 6)), tb):
                return False
            if not (nu0 <= t[7] < min(t[6], (t[0] - t[5] - t[6]) / 2)):
                return False
            return not in_g(_tup(g5, t, (1, 2, 3, 4, 5, 6, 7)), tb)
        # UC07
        if in6 or not dup_lift(a6dp, P):
            return False
        if not (nu0 <= t[6] < min(t[4], g5 / 2)):
            return False
        if in_g(_tup(t[0] - t[5], t, (1, 2, 3, 4, 5, 6)), tb):
            return False
        if not (nu0 <= t[7] < min(t[6], (g5 - t[6]) / 2)):
            return False
        return not in_g(_tup(t[0] - t[5], t, (1, 2, 3, 4, 5, 6, 7)), tb)
    if 12 <= pid <= 17:
        # UC08-UC13: role reversal through beta = 1 - t1 - t2 - t3
        if not (_head_c(t, tb) and not _part3(t, P) and nu0 <= t[3] < t[0] / 2):
            return False
        beta = _rem(t, 3)
        a4p = _tup(beta, t, (1, 2, 3))
        a4pp = _tup(t[0] - t[3], t, (1, 3, 2))
        if in_g(a4p, tb):
            return False
        s4p = dup_lift(a4p, P)
        if pid <= 15:
            if s4p or dup_lift(a4pp, P):
                return False
            if pid == 12:  # UC08
                return True
            if pid == 13:  # UC09
                return (t[3] < t[4] < (t[0] - t[3]) / 2
                        and in_g(_tup(beta, t, (1, 2, 3, 4)), tb))
            if pid == 14:  # UC10
                return (t[2] < t[4] < beta / 2
                        and in_g(_tup(t[0] - t[3], t, (1, 2, 3, 4)), tb))
            # UC11
            return (t[3] < t[4] < (t[0] - t[3]) / 2
                    and in_g(_tup(beta, t, (1, 2, 3, 4)), tb)
                    and t[2] < t[5] < beta / 2
                    and in_g(_tup(t[0] - t[3], t, (1, 2, 3, 5)), tb))
        if pid == 16:  # UC12
            return (s4p and nu0 <= t[4] < min(t[3], (t[0] - t[3]) / 2)
                    and not in_g(_tup(beta, t, (1, 2, 3, 4)), tb)
                    and nu0 <= t[5] < min(t[4], (t[0] - t[3] - t[4]) / 2)
                    and not in_g(_tup(beta, t, (1, 2, 3, 4, 5)), tb))
        # UC13
        if s4p or not dup_lift(a4pp, P):
            return False
        cap6 = beta - t[4]
        if P[P_EQ13] < 0.5:
            cap6 -= t[3]
        return (nu0 <= t[4] < min(t[2], beta / 2)
                and not in_g(_tup(t[0] - t[3], t, (1, 2, 3, 4)), tb)
                and nu0 <= t[5] < min(t[4], cap6 / 2)
                and not in_g(_tup(t[0] - t[3], t, (1, 2, 3, 4, 5)), tb))
    # ---- upper side
    if pid == 18:  # H
        return in_h(t[0], P)
    if 19 <= pid <= 24:  # VA1-VA6
        primed = pid >= 22
        if not _va_head(t, tb, primed):
            return False
        q = pid - 22 if primed else pid - 19
        plus = dup_lift(_pre(t, 3), P)
        if q == 0:
            return not plus
        if q == 1:
            return not plus and _above(t, 3, P) and in_g(_pre(t, 4), tb)
        return (plus and _chain(t, 3, P) and not in_g(_pre(t, 4), tb)
                and _chain(t, 4, P) and not in_g(_pre(t, 5), tb))
    if pid == 25:  # VA7
        return (_box(t, P) and not in_h(t[0], P) and in_a2(t[0], t[1], P)
                and _chain(t, 2, P) and not in_g(_pre(t, 3), tb))
    if pid == 26:  # VA8
        return (_box(t, P) and in_a2_prime(t[0], t[1], P) and _chain(t, 2, P)
                and not in_g(_pre(t, 3), tb))
    if 27 <= pid <= 33:  # VC1-VC7
        if not _vc_head(t, tb):
            return False
        a3 = _pre(t, 3)
        plus = dup_lift(a3, P)
        if pid == 27 or pid == 28:
            if plus or d_sharp(a3, P):
                return False
            if pid == 27:
                return True
            return _above(t, 3, P) and in_g(_pre(t, 4), tb)
        if pid == 29 or pid == 31:  # VC3, VC5
            if not (plus and _chain(t, 3, P) and not in_g(_pre(t, 4), tb)
                    and _chain(t, 4, P) and not in_g(_pre(t, 5), tb)):
                return False
            pp = dup_lift(_pre(t, 5), P)
            if pid == 29:
                return not pp
            return (pp and _chain(t, 5, P) and not in_g(_pre(t, 6), tb)
                    and _chain(t, 6, P) and not in_g(_pre(t, 7), tb))
        # VC4, VC6, VC7: role reversal through eta = 1 - t1 - ... - t4
        if plus or not d_sharp(a3, P):
            return False
        if not (_chain(t, 3, P) and not in_g(_pre(t, 4), tb) and nu0 <= t[4] < t[0] / 2):
            return False
        eta = _rem(t, 4)
        a5s = _tup(eta, t, (1, 2, 3, 4))
        a5sp = _tup(t[0] - t[4], t, (1, 2, 4, 3))
        if in_g(a5s, tb):
            return False
        pp = dup_lift(a5s, P)
        if pid == 30:  # VC4
            return not pp and not dup_lift(a5sp, P)
        if pid == 32:  # VC6
            return (pp and nu0 <= t[5] < min(t[4], (t[0] - t[4]) / 2)
                    and not in_g(_tup(eta, t, (1, 2, 3, 4, 5)), tb)
                    and nu0 <= t[6] < min(t[5], (t[0] - t[4] - t[5]) / 2)
                    and not in_g(_tup(eta, t, (1, 2, 3, 4, 5, 6)), tb))
        # VC7
        return (not pp and dup_lift(a5sp, P)
                and nu0 <= t[5] < min(t[3], eta / 2)
                and not in_g(_tup(t[0] - t[4], t, (1, 2, 3, 4, 5)), tb)
                and nu0 <= t[6] < min(t[5], (eta - t[5]) / 2)
                and not in_g(_tup(t[0] - t[4], t, (1, 2, 3, 4, 5, 6)), tb))
    if pid == 34:  # full region A, used only for the two-dimensional check
        return _box(t, P) and in_a(t[0], t[1])
    return False


COMPOSITE_IDS = {
    "UA1": 0, "UA2": 1, "UA3": 2, "UA4": 3, "UA5": 4,
    "UC01": 5, "UC02": 6, "UC03": 7, "UC04": 8, "UC05": 9, "UC06": 10, "UC07": 11,
    "UC08": 12, "UC09": 13, "UC10": 14, "UC11": 15, "UC12": 16, "UC13": 17,
    "H": 18,
    "VA1": 19, "VA2": 20, "VA3": 21, "VA4": 22, "VA5": 23, "VA6": 24, "VA7": 25, "VA8": 26,
    "VC1": 27, "VC2": 28, "VC3": 29, "VC4": 30, "VC5": 31, "VC6": 32, "VC7": 33,
    "Afull": 34,
}

COMPOSITE_ARITY = {
    "UA1": 2, "UA2": 4, "UA3": 5, "UA4": 6, "UA5": 4,
    "UC01": 4, "UC02": 5, "UC03": 6, "UC04": 6, "UC05": 8, "UC06": 8, "UC07": 8,
    "UC08": 4, "UC09": 5, "UC10": 5, "UC11": 6, "UC12": 6, "UC13": 6,
    "H": 1,
    "VA1": 3, "VA2": 4, "VA3": 5, "VA4": 3, "VA5": 4, "VA6": 5, "VA7": 3, "VA8": 3,
    "VC1": 3, "VC2": 4, "VC3": 5, "VC4": 5, "VC5": 7, "VC6": 7, "VC7": 7,
    "Afull": 2,
}

# ---------------------------------------------------------------------------
# Python-facing API
# ---------------------------------------------------------------------------

_G_ARITY = {"G2": 2, "G3": 3, "G4": 4, "G5": 5, "G6": 6, "G7": 7, "G8": 8}
_D_ARITY = {
    "D0": 2, "D0p": 2, "D1": 3, "D2": 3, "D1p": 3, "D2p": 3, "D3": 2,
    "Dplus": 3, "Dsharp": 3, "Dstar": 4, "Ddag": 4, "Ddagdag": 4,
    "Dplusplus": 5, "Dstarstar": 6,
}
_GEO_ARITY = {
    "H": 1, "A": 2, "B": 2, "C": 2, "Aprime": 2, "A1": 2, "A2": 2,
    "B1": 2, "B2": 2, "A1prime": 2, "A2prime": 2,
}

REGION_IDS = tuple(_G_ARITY) + tuple(_D_ARITY) + tuple(_GEO_ARITY) + tuple(
    k for k in COMPOSITE_IDS if k not in ("H", "Afull")
)


def _as_array(t: Sequence[float]) -> np.ndarray:
    arr = np.asarray(t, dtype=np.float64).ravel()
    if arr.size < 1 or arr.size > 8:
        raise ValueError("exponent tuples have 1 to 8 entries")
    if np.any(arr <= 0.0) or np.any(arr >= 1.0):
        raise ValueError("exponents must lie in (0, 1)")
    if arr.sum() > 1.0 + 1e-12:
        raise ValueError("exponents sum to more than 1")
    return arr


def _check_arity(name: str, arr: np.ndarray, want: int) -> None:
    if arr.size != want:
        raise ValueError(f"{name} expects {want} coordinates, got {arr.size}")


def tables_for(theta: float | ThetaParams, config: RegionConfig | None = None) -> RegionTables:
    params = theta if isinstance(theta, ThetaParams) else ThetaParams(theta)
    return RegionTables(params, config)


def in_G2(tables: RegionTables, t1: float, t2: float) -> bool:
    return bool(pair_lemma(t1, t2, tables.P))


def in_G3_direct(tables: RegionTables, t: Sequence[float]) -> bool:
    arr = _as_array(t)
    _check_arity("G3", arr, 3)
    P, _, c33, r33, d33, *_ = tables.pack
    r = 1.0 - arr.sum()
    return bool(rows4_lemma(arr[0], arr[1], arr[2], r, P)
                or sys4_lemma(arr[0], arr[1], arr[2], r, P, c33, r33, d33))


def in_G4_direct(tables: RegionTables, t: Sequence[float]) -> bool:
    arr = _as_array(t)
    _check_arity("G4", arr, 4)
    return bool(table_lemma(np.append(arr, 1.0 - arr.sum()), tables.pack[5]))


def in_G5_direct(tables: RegionTables, t: Sequence[float]) -> bool:
    arr = _as_array(t)
    _check_arity("G5", arr, 5)
    return bool(table_lemma(np.append(arr, 1.0 - arr.sum()), tables.pack[6]))


def in_G(tables: RegionTables, t: Sequence[float]) -> bool:
    """G_n membership for an n-tuple, 2 <= n <= 8, under the configured lemma set."""
    arr = _as_array(t)
    if arr.size < 2:
        raise ValueError("G sets need at least two coordinates")
    return bool(in_g(arr, tables.pack))


def partition_lift(tables: RegionTables, t: Sequence[float], primed: bool = True) -> bool:
    """Can t be grouped into (m, n) in D0 or (m, n, h) in D1 u D2 (primed sets by default)?"""
    arr = np.asarray(t, dtype=np.float64).ravel()
    if not 2 <= arr.size <= 8:
        raise ValueError("partition_lift needs 2 to 8 entries")
    return bool(d_lift(arr, primed, False, tables.P))


def in_D_family(tables: RegionTables, t: Sequence[float], name: str) -> bool:
    if name not in _D_ARITY:
        raise ValueError(f"unknown D-family region {name!r}")
    arr = np.asarray(t, dtype=np.float64).ravel()
    _check_arity(name, arr, _D_ARITY[name])
    P = tables.P
    if name == "D0":
        return bool(d0_ok(arr[0], arr[1], P))
    if name == "D0p":
        return bool(d0p_ok(arr[0], arr[1], P))
    if name == "D1":
        return bool(d1_ok(arr[0], arr[1], arr[2], P))
    if name == "D2":
        return bool(d2_ok(arr[0], arr[1], arr[2], P))
    if name == "D1p":
        return bool(d1p_ok(arr[0], arr[1], arr[2], P))
    if name == "D2p":
        return bool(d2p_ok(arr[0], arr[1], arr[2], P))
    if name == "D3":
        return bool(in_d3(arr[0], arr[1], P))
    if name in ("Dstar", "Dstarstar", "Dplus", "Dplusplus"):
        return bool(dup_lift(arr, P))
    if name == "Ddag":
        return bool(d_dag(arr, P))
    if name == "Ddagdag":
        return bool(d_ddag(arr, P))
    return bool(d_sharp(arr, P))


def in_geometric(tables: RegionTables, t: Sequence[float], name: str) -> bool:
    if name not in _GEO_ARITY:
        raise ValueError(f"unknown geometric region {name!r}")
    arr = np.asarray(t, dtype=np.float64).ravel()
    _check_arity(name, arr, _GEO_ARITY[name])
    P = tables.P
    if name == "H":
        return bool(in_h(arr[0], P))
    a1, a2 = arr
    fn = {
        "A": lambda: in_a(a1, a2),
        "B": lambda: in_b(a1, a2),
        "C": lambda: in_c(a1, a2, P),
        "Aprime": lambda: in_a_prime(a1, a2),
        "A1": lambda: in_a1(a1, a2, P),
        "A2": lambda: in_a2(a1, a2, P),
        "B1": lambda: in_b1(a1, a2, P),
        "B2": lambda: in_b2(a1, a2, P),
        "A1prime": lambda: in_a1_prime(a1, a2, P),
        "A2prime": lambda: in_a2_prime(a1, a2, P),
    }[name]
    return bool(fn())


def in_composite(tables: RegionTables, t: Sequence[float], name: str) -> bool:
    if name not in COMPOSITE_IDS:
        raise ValueError(f"unknown composite region {name!r}")
    arr = np.asarray(t, dtype=np.float64).ravel()
    _check_arity(name, arr, COMPOSITE_ARITY[name])
    return bool(composite(COMPOSITE_IDS[name], arr, tables.pack))


def in_region(tables: RegionTables, t: Sequence[float], name: str) -> bool:
    """Dispatch on any region name."""
    if name in _G_ARITY:
        arr = np.asarray(t, dtype=np.float64).ravel()
        _check_arity(name, arr, _G_ARITY[name])
        if name == "G2":
            return in_G2(tables, arr[0], arr[1])
        return in_G(tables, arr)
    if name in _D_ARITY:
        return in_D_family(tables, t, name)
    if name in _GEO_ARITY:
        return in_geometric(tables, t, name)
    return in_composite(tables, t, name)


def region_arity(name: str) -> int:
    for table in (_G_ARITY, _D_ARITY, _GEO_ARITY, COMPOSITE_ARITY):
        if name in table:
            return table[name]
    raise ValueError(f"unknown region {name!r}")
