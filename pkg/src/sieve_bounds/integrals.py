"""Catalog of the loss and saving integrals.

Each term is an iterated integral over t1 > t2 > ... with bounds given as max/min
of affine forms in earlier variables, an indicator (a composite region), and a
weight built from one or two Buchstab factors over a monomial denominator.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Iterable

import numpy as np
from numba import njit

from .buchstab import BuchstabKind, omega_kernel
from .regions import COMPOSITE_ARITY, COMPOSITE_IDS, RegionConfig, RegionTables, composite
from .sieve_params import ThetaParams

MAX_DIM = 8
NCOEF = MAX_DIM + 1

LOWER = "Lower"
UPPER = "Upper"

# Affine form: (c0, c1, ..., c8) meaning c0 + sum c_i t_i.
Affine = tuple


def const(v: float) -> Affine:
    return (float(v),) + (0.0,) * MAX_DIM


def affine(c0: float, *terms: tuple[int, float]) -> Affine:
    row = [0.0] * NCOEF
    row[0] = c0
    for i, c in terms:
        row[i] += c
    return tuple(row)


def var(i: int, coef: float = 1.0) -> Affine:
    row = [0.0] * NCOEF
    row[i] = coef
    return tuple(row)


def one_minus(*idx: int, scale: float = 1.0) -> Affine:
    """scale * (1 - sum t_i)."""
    row = [0.0] * NCOEF
    row[0] = scale
    for i in idx:
        row[i] -= scale
    return tuple(row)


def t_minus(first: int, *idx: int, scale: float = 1.0) -> Affine:
    """scale * (t_first - sum t_i)."""
    row = [0.0] * NCOEF
    row[first] = scale
    for i in idx:
        row[i] -= scale
    return tuple(row)


def affine_str(row: Affine) -> str:
    parts = []
    c0 = row[0]
    if abs(c0) > 0:
        parts.append(f"{c0:.10g}")
    for i in range(1, NCOEF):
        c = row[i]
        if c == 0:
            continue
        mag = abs(c)
        term = f"t{i}" if mag == 1 else f"{mag:.10g}*t{i}"
        if not parts:
            parts.append(term if c > 0 else "-" + term)
        else:
            parts.append(("+ " if c > 0 else "- ") + term)
    return " ".join(parts) if parts else "0"


@dataclass(frozen=True)
class VarBounds:
    lower: tuple[Affine, ...]   # t_i >= max(lower)
    upper: tuple[Affine, ...]   # t_i <  min(upper)

    def describe(self) -> tuple[str, str]:
        def wrap(fn, rows):
            s = [affine_str(r) for r in rows]
            return s[0] if len(s) == 1 else f"{fn}(" + ", ".join(s) + ")"
        return wrap("max", self.lower), wrap("min", self.upper)


@dataclass(frozen=True)
class BuchstabFactor:
    """omega(numerator / t_denom) or its bound of the given kind."""
    numerator: Affine
    denom: int
    kind: BuchstabKind

    def describe(self) -> str:
        return f"w[{self.kind.name}](({affine_str(self.numerator)})/t{self.denom})"


@dataclass(frozen=True)
class WeightForm:
    factors: tuple[BuchstabFactor, ...]
    powers: tuple[int, ...]  # exponent of t_i in the denominator, i = 1..dim

    @property
    def variant(self) -> str:
        return "SingleBuchstab" if len(self.factors) == 1 else "DoubleBuchstab"

    def describe(self) -> str:
        num = " * ".join(f.describe() for f in self.factors)
        den = " ".join(
            f"t{i + 1}" + (f"^{p}" if p > 1 else "") for i, p in enumerate(self.powers) if p
        )
        return f"{num} / ({den})"


@dataclass(frozen=True)
class IntegralSpec:
    name: str
    side: str
    dim: int
    bounds: tuple[VarBounds, ...]
    predicate: str
    weight: WeightForm
    sign: int
    tables: RegionTables = field(compare=False, repr=False)

    @property
    def kind_per_factor(self) -> tuple[BuchstabKind, ...]:
        return tuple(f.kind for f in self.weight.factors)

    @property
    def theta(self) -> float:
        return self.tables.params.theta

    def to_dict(self) -> dict:
        return {
            "name": self.name,
            "side": self.side,
            "theta": self.theta,
            "dim": self.dim,
            "sign": self.sign,
            "predicate": self.predicate,
            "kinds": [k.name for k in self.kind_per_factor],
            "weight": self.weight.describe(),
            "variant": self.weight.variant,
            "bounds": [
                {"var": f"t{i + 1}", "lower": lo, "upper": hi}
                for i, (lo, hi) in enumerate(b.describe() for b in self.bounds)
            ],
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2)

    # packed arrays for the compiled kernels
    def packed(self):
        return _pack(self)


def _pack(spec: IntegralSpec):
    d = spec.dim
    lo = np.zeros((d, 4, NCOEF))
    hi = np.zeros((d, 4, NCOEF))
    nlo = np.zeros(d, dtype=np.int64)
    nhi = np.zeros(d, dtype=np.int64)
    for i, b in enumerate(spec.bounds):
        nlo[i] = len(b.lower)
        nhi[i] = len(b.upper)
        for r, row in enumerate(b.lower):
            lo[i, r] = row
        for r, row in enumerate(b.upper):
            hi[i, r] = row
    nf = len(spec.weight.factors)
    fnum = np.zeros((nf, NCOEF))
    fden = np.zeros(nf, dtype=np.int64)
    fkind = np.zeros(nf, dtype=np.int64)
    for j, f in enumerate(spec.weight.factors):
        fnum[j] = f.numerator
        fden[j] = f.denom
        fkind[j] = int(f.kind)
    pw = np.zeros(d, dtype=np.int64)
    pw[:] = spec.weight.powers
    return lo, nlo, hi, nhi, fnum, fden, fkind, pw, COMPOSITE_IDS[spec.predicate]


# ---------------------------------------------------------------------------
# Compiled evaluation shared with the integrators
# ---------------------------------------------------------------------------


@njit(cache=True)
def affine_eval(row, t, n):
    s = row[0]
    for i in range(n):
        s += row[i + 1] * t[i]
    return s


@njit(cache=True)
def interval(i, t, lo, nlo, hi, nhi):
    """Bounds of variable i (0-based) given t[0..i-1]."""
    a = -np.inf
    for r in range(nlo[i]):
        a = max(a, affine_eval(lo[i, r], t, i))
    b = np.inf
    for r in range(nhi[i]):
        b = min(b, affine_eval(hi[i, r], t, i))
    return a, b


@njit(cache=True)
def weight_kernel(t, fnum, fden, fkind, pw):
    d = t.shape[0]
    w = 1.0
    for j in range(fnum.shape[0]):
        den = t[fden[j] - 1]
        u = affine_eval(fnum[j], t, d) / den
        if u < 1.0:
            return 0.0
        w *= omega_kernel(u, fkind[j])
    for i in range(d):
        for _ in range(pw[i]):
            w /= t[i]
    return w


@njit(cache=True)
def integrand_kernel(t, fnum, fden, fkind, pw, pid, tb):
    if not composite(pid, t, tb):
        return 0.0
    return weight_kernel(t, fnum, fden, fkind, pw)


def weight_eval(spec: IntegralSpec, point) -> float:
    """Integrand value at a point inside the iterated bounds (0 off the indicator)."""
    t = np.asarray(point, dtype=np.float64).ravel()
    if t.size != spec.dim:
        raise ValueError(f"{spec.name} is {spec.dim}-dimensional, got {t.size} coordinates")
    if np.any(t < 1e-15):
        raise ValueError("coordinates must be positive")
    lo, nlo, hi, nhi, fnum, fden, fkind, pw, pid = spec.packed()
    return float(integrand_kernel(t, fnum, fden, fkind, pw, pid, spec.tables.pack))


# ---------------------------------------------------------------------------
# Catalog construction
# ---------------------------------------------------------------------------

U, L, S = BuchstabKind.UPPER, BuchstabKind.LOWER, BuchstabKind.SIMPLE_UPPER
EXACT = BuchstabKind.EXACT

LOWER_NAMES = (
    "UA1", "UA2", "UA3", "UA4", "UA5",
    "UC01", "UC02", "UC03", "UC04", "UC05", "UC06", "UC07",
    "UC08", "UC09", "UC10", "UC11", "UC12", "UC13",
)
UPPER_NAMES = (
    "H", "VA1", "VA2", "VA3", "VA4", "VA5", "VA6", "VA7", "VA8",
    "VC1", "VC2", "VC3", "VC4", "VC5", "VC6", "VC7",
)
SAVINGS = frozenset({"UA3", "UC02", "UC09", "UC10", "VA2", "VA5", "VC2"})


class _Builder:
    def __init__(self, tables: RegionTables):
        p = tables.params
        self.tables = tables
        self.nu0 = p.nu0
        th = p.theta
        self.split = min((3 * th - 1) / 2, (1 + th) / 5)
        self.h_lo = 3.5 * th - 1.5
        self.h_hi = 4 - 7 * th
        self.nu_at0 = float(tables.P[7])

    # outer two variables ------------------------------------------------
    def region_a(self, t2_cap=(), t2_floor=(), t1_lo=0.25):
        return [
            VarBounds((const(t1_lo),), (const(0.4),)),
            VarBounds((one_minus(1, scale=1 / 3),) + tuple(t2_floor),
                      (var(1), affine(1.0, (1, -2.0))) + tuple(t2_cap)),
        ]

    def region_a_prime(self):
        # A' adds t1 >= 0.38 and t1 + 3 t2 < 1.005
        return self.region_a(t2_cap=(affine(1.005 / 3, (1, -1 / 3)),), t1_lo=0.38)

    def box(self, t1_lo=None):
        t1_lo = self.nu0 if t1_lo is None else t1_lo
        return [
            VarBounds((const(t1_lo),), (const(0.5),)),
            VarBounds((const(self.nu0),), (var(1), one_minus(1, scale=0.5))),
        ]

    # inner variables --------------------------------------------------------
    def chain(self, k):
        # nu0 <= t_k < min(t_{k-1}, (1 - t_1 - ... - t_{k-1}) / 2)
        return VarBounds((const(self.nu0),), (var(k - 1), one_minus(*range(1, k), scale=0.5)))

    def above(self, k):
        # t_{k-1} <= t_k < (1 - t_1 - ... - t_{k-1}) / 2
        return VarBounds((var(k - 1),), (one_minus(*range(1, k), scale=0.5),))

    def span(self, lower, *upper):
        return VarBounds((lower,), tuple(upper))

    def floor(self):
        return const(self.nu0)


def _single(num, den, kind, powers):
    return WeightForm((BuchstabFactor(num, den, kind),), tuple(powers))


def _double(f1, f2, powers):
    return WeightForm((BuchstabFactor(*f1), BuchstabFactor(*f2)), tuple(powers))


def _pows(dim, squared, absent=()):
    p = [1] * dim
    for i in squared:
        p[i - 1] = 2
    for i in absent:
        p[i - 1] = 0
    return p


def _spec(b: _Builder, name, side, bounds, weight, sign=1):
    dim = len(bounds)
    if COMPOSITE_ARITY[name] != dim:
        raise AssertionError(f"{name}: arity mismatch")
    return IntegralSpec(name, side, dim, tuple(bounds), name, weight, sign, b.tables)


def _lower_specs(b: _Builder) -> list[IntegralSpec]:
    nu = b.floor()
    sa = b.region_a_prime()
    ca = b.box(b.nu_at0)
    half_t1 = var(1, 0.5)
    specs = []

    def add(name, bounds, weight, sign=1):
        specs.append(_spec(b, name, LOWER, bounds, weight, sign))

    add("UA1", b.region_a(), _single(one_minus(1, 2), 2, U, _pows(2, [2])))
    add("UA2", sa + [b.chain(3), b.chain(4)], _single(one_minus(1, 2, 3, 4), 4, U, _pows(4, [4])))
    add("UA3", sa + [b.chain(3), b.chain(4), b.above(5)],
        _single(one_minus(1, 2, 3, 4, 5), 5, L, _pows(5, [5])), -1)
    add("UA4", sa + [b.chain(3), b.chain(4), b.chain(5), b.chain(6)],
        _single(one_minus(1, 2, 3, 4, 5, 6), 6, U, _pows(6, [6])))
    add("UA5", sa + [b.chain(3), b.span(nu, half_t1)],
        _double((t_minus(1, 4), 4, U), (one_minus(1, 2, 3), 3, U), _pows(4, [3, 4], [1])))

    c3 = ca + [b.chain(3)]
    add("UC01", c3 + [b.chain(4)], _single(one_minus(1, 2, 3, 4), 4, U, _pows(4, [4])))
    add("UC02", c3 + [b.chain(4), b.above(5)],
        _single(one_minus(1, 2, 3, 4, 5), 5, L, _pows(5, [5])), -1)
    add("UC03", c3 + [b.chain(4), b.chain(5), b.chain(6)],
        _single(one_minus(1, 2, 3, 4, 5, 6), 6, U, _pows(6, [6])))
    c5 = c3 + [b.chain(4), b.chain(5)]
    add("UC04", c5 + [b.span(nu, half_t1)],
        _double((t_minus(1, 6), 6, U), (one_minus(1, 2, 3, 4, 5), 5, U), _pows(6, [5, 6], [1])))
    add("UC05", c5 + [b.chain(6), b.chain(7), b.chain(8)],
        _single(one_minus(*range(1, 9)), 8, S, _pows(8, [8])))
    add("UC06", c5 + [b.span(nu, half_t1),
                      b.span(nu, var(6), t_minus(1, 6, scale=0.5)),
                      b.span(nu, var(7), t_minus(1, 6, 7, scale=0.5))],
        _double((t_minus(1, 6, 7, 8), 8, S), (one_minus(1, 2, 3, 4, 5), 5, S),
                _pows(8, [5, 8], [1])))
    add("UC07", c5 + [b.span(nu, half_t1),
                      b.span(nu, var(5), one_minus(1, 2, 3, 4, 5, scale=0.5)),
                      b.span(nu, var(7), one_minus(1, 2, 3, 4, 5, 7, scale=0.5))],
        _double((t_minus(1, 6), 6, S), (one_minus(1, 2, 3, 4, 5, 7, 8), 8, S),
                _pows(8, [6, 8], [1])))

    r4 = c3 + [b.span(nu, half_t1)]
    add("UC08", r4, _double((t_minus(1, 4), 4, U), (one_minus(1, 2, 3), 3, U),
                            _pows(4, [3, 4], [1])))
    add("UC09", r4 + [b.span(var(4), t_minus(1, 4, scale=0.5))],
        _double((t_minus(1, 4, 5), 5, L), (one_minus(1, 2, 3), 3, L), _pows(5, [3, 5], [1])), -1)
    add("UC10", r4 + [b.span(var(3), one_minus(1, 2, 3, scale=0.5))],
        _double((t_minus(1, 4), 4, L), (one_minus(1, 2, 3, 5), 5, L), _pows(5, [4, 5], [1])), -1)
    add("UC11", r4 + [b.span(var(4), t_minus(1, 4, scale=0.5)),
                      b.span(var(3), one_minus(1, 2, 3, scale=0.5))],
        _double((t_minus(1, 4, 5), 5, U), (one_minus(1, 2, 3, 6), 6, U), _pows(6, [5, 6], [1])))
    add("UC12", r4 + [b.span(nu, var(4), t_minus(1, 4, scale=0.5)),
                      b.span(nu, var(5), t_minus(1, 4, 5, scale=0.5))],
        _double((t_minus(1, 4, 5, 6), 6, U), (one_minus(1, 2, 3), 3, U), _pows(6, [3, 6], [1])))
    if b.tables.config.eq13_bound_as_printed:
        cap6 = one_minus(1, 2, 3, 5, scale=0.5)
    else:
        cap6 = one_minus(1, 2, 3, 4, 5, scale=0.5)
    add("UC13", r4 + [b.span(nu, var(3), one_minus(1, 2, 3, scale=0.5)),
                      b.span(nu, var(5), cap6)],
        _double((t_minus(1, 4), 4, U), (one_minus(1, 2, 3, 5, 6), 6, U), _pows(6, [4, 6], [1])))
    return specs


def _upper_specs(b: _Builder) -> list[IntegralSpec]:
    nu = b.floor()
    half_t1 = var(1, 0.5)
    specs = []

    def add(name, bounds, weight, sign=1):
        specs.append(_spec(b, name, UPPER, bounds, weight, sign))

    add("H", [VarBounds((const(b.h_lo),), (const(b.h_hi),))],
        _single(one_minus(1), 1, U, [2]))

    a1 = b.region_a(t2_cap=(const(b.split),))
    a2 = b.region_a(t2_floor=(const(b.split),))
    ca = b.box(b.nu_at0)
    w3 = _single(one_minus(1, 2, 3), 3, U, _pows(3, [3]))
    w4 = _single(one_minus(1, 2, 3, 4), 4, L, _pows(4, [4]))
    w5 = _single(one_minus(1, 2, 3, 4, 5), 5, U, _pows(5, [5]))
    for base, names in ((a1, ("VA1", "VA2", "VA3")), (a1, ("VA4", "VA5", "VA6")),
                        (ca, ("VC1", "VC2", "VC3"))):
        add(names[0], base + [b.chain(3)], w3)
        add(names[1], base + [b.chain(3), b.above(4)], w4, -1)
        add(names[2], base + [b.chain(3), b.chain(4), b.chain(5)], w5)
    add("VA7", a2 + [b.chain(3)], w3)
    add("VA8", a2 + [b.chain(3)], w3)

    c4 = ca + [b.chain(3), b.chain(4)]
    add("VC4", c4 + [b.span(nu, half_t1)],
        _double((t_minus(1, 5), 5, U), (one_minus(1, 2, 3, 4), 4, U), _pows(5, [4, 5], [1])))
    add("VC5", c4 + [b.chain(5), b.chain(6), b.chain(7)],
        _single(one_minus(*range(1, 8)), 7, S, _pows(7, [7])))
    add("VC6", c4 + [b.span(nu, half_t1),
                     b.span(nu, var(5), t_minus(1, 5, scale=0.5)),
                     b.span(nu, var(6), t_minus(1, 5, 6, scale=0.5))],
        _double((t_minus(1, 5, 6, 7), 7, S), (one_minus(1, 2, 3, 4), 4, S), _pows(7, [4, 7], [1])))
    add("VC7", c4 + [b.span(nu, half_t1),
                     b.span(nu, var(4), one_minus(1, 2, 3, 4, scale=0.5)),
                     b.span(nu, var(6), one_minus(1, 2, 3, 4, 6, scale=0.5))],
        _double((t_minus(1, 5), 5, S), (one_minus(1, 2, 3, 4, 6, 7), 7, S), _pows(7, [5, 7], [1])))
    order = {n: i for i, n in enumerate(UPPER_NAMES)}
    specs.sort(key=lambda s: order[s.name])
    return specs


def _tables(theta, config) -> RegionTables:
    if isinstance(theta, RegionTables):
        return theta
    params = theta if isinstance(theta, ThetaParams) else ThetaParams(float(theta))
    return RegionTables(params, config)


def catalog(theta, side: str, config: RegionConfig | None = None) -> list[IntegralSpec]:
    """All loss/saving integrals of one side, in table order."""
    b = _Builder(_tables(theta, config))
    if side == LOWER:
        return _lower_specs(b)
    if side == UPPER:
        return _upper_specs(b)
    raise ValueError(f"side must be {LOWER!r} or {UPPER!r}")


def full_a_spec(theta, config: RegionConfig | None = None) -> IntegralSpec:
    """The whole region A with the exact omega, u < 4 throughout."""
    b = _Builder(_tables(theta, config))
    return _spec(b, "Afull", LOWER, b.region_a(), _single(one_minus(1, 2), 2, EXACT, _pows(2, [2])))


def find_spec(theta, name: str, config: RegionConfig | None = None) -> IntegralSpec:
    if name == "Afull":
        return full_a_spec(theta, config)
    side = LOWER if name in LOWER_NAMES else UPPER if name in UPPER_NAMES else None
    if side is None:
        raise ValueError(f"unknown integral {name!r}")
    return next(s for s in catalog(theta, side, config) if s.name == name)


def specs_json(specs: Iterable[IntegralSpec]) -> str:
    return json.dumps([s.to_dict() for s in specs], indent=2)
