"""Assemble per-region losses into LB(theta) and UB(theta)."""

from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import dataclass, field
from typing import Iterable, Mapping

from .integrals import LOWER, SAVINGS, UPPER, IntegralSpec, catalog
from .quadrature import (
    ADAPTIVE,
    DEFAULT_TOL,
    LOW_DISCREPANCY,
    IntegralEstimate,
    integrate,
)
from .regions import RegionConfig

BOUND_THETA_MIN = 0.52
BOUND_THETA_MAX = 0.525

# region name -> member terms, in table order
LOWER_GROUPS: dict[str, tuple[str, ...]] = {
    "A": ("UA1", "UA2", "UA3", "UA4", "UA5"),
    "C": ("UC01", "UC02", "UC03", "UC04", "UC05", "UC06", "UC07",
          "UC08", "UC09", "UC10", "UC11", "UC12", "UC13"),
}
UPPER_GROUPS: dict[str, tuple[str, ...]] = {
    "H": ("H",),
    "A1": ("VA1", "VA2", "VA3"),
    "A1prime": ("VA4", "VA5", "VA6"),
    "A2": ("VA7",),
    "A2prime": ("VA8",),
    "C": ("VC1", "VC2", "VC3", "VC4", "VC5", "VC6", "VC7"),
}
# multiplicity of each region in the total loss
LOWER_MULT = {"A": 2, "C": 1}
UPPER_MULT = {g: 1 for g in UPPER_GROUPS}

SIGNS: dict[str, int] = {
    n: -1 if n in SAVINGS else 1
    for groups in (LOWER_GROUPS, UPPER_GROUPS) for g in groups.values() for n in g
}

# Published integral values, one tuple per term over REFERENCE_THETAS.
REFERENCE_THETAS = (0.52, 0.521, 0.522, 0.523, 0.524)
REFERENCE_VALUES: dict[str, tuple[float, ...]] = {
    "UA1": (0.239221,) * 5,
    "UA2": (0.0,) * 5,
    "UA3": (0.0,) * 5,
    "UA4": (0.0,) * 5,
    "UA5": (0.0,) * 5,
    "UC01": (0.197907, 0.178493, 0.158194, 0.136616, 0.119466),
    "UC02": (0.001607, 0.001789, 0.001688, 0.001790, 0.001787),
    "UC03": (0.020936, 0.014611, 0.010405, 0.005868, 0.003499),
    "UC04": (0.065033, 0.043988, 0.037108, 0.014831, 0.007705),
    "UC05": (0.000101, 0.000043, 0.000018, 0.000006, 0.000002),
    "UC06": (0.000131, 0.000106, 0.000073, 0.0, 0.0),
    "UC07": (0.0,) * 5,
    "UC08": (0.201090, 0.181571, 0.165022, 0.143845, 0.128240),
    "UC09": (0.000693, 0.001054, 0.001193, 0.001259, 0.001338),
    "UC10": (0.000222, 0.000251, 0.000286, 0.000295, 0.000293),
    "UC11": (0.000048, 0.000040, 0.000029, 0.000028, 0.000265),
    "UC12": (0.008809, 0.005143, 0.004523, 0.001541, 0.000727),
    "UC13": (0.0,) * 5,
    "H": (0.182012, 0.133815, 0.085930, 0.038334, 0.0),
    "VA1": (0.179773, 0.217159, 0.254821, 0.292355, 0.323686),
    "VA2": (0.004874, 0.007200, 0.010359, 0.017561, 0.023389),
    "VA3": (0.043475, 0.035114, 0.027426, 0.020820, 0.015243),
    "VA4": (0.310609, 0.313652, 0.316896, 0.320119, 0.323686),
    "VA5": (0.008299, 0.010006, 0.012635, 0.019583, 0.023389),
    "VA6": (0.051108, 0.038581, 0.028772, 0.021186, 0.015243),
    "VA7": (0.102865, 0.109021, 0.122256, 0.140969, 0.155383),
    "VA8": (0.201264, 0.195899, 0.187831, 0.173941, 0.155383),
    "VC1": (0.261034, 0.260555, 0.257913, 0.254700, 0.249854),
    "VC2": (0.000575, 0.000787, 0.000850, 0.000815, 0.000795),
    "VC3": (0.128160, 0.107541, 0.092325, 0.070907, 0.055342),
    "VC4": (0.307367, 0.249849, 0.210236, 0.163109, 0.128740),
    "VC5": (0.004722, 0.002606, 0.001446, 0.000670, 0.000322),
    "VC6": (0.003889, 0.002529, 0.000965, 0.000461, 0.000512),
    "VC7": (0.000013, 0.0, 0.0, 0.0, 0.0),
}
# Published region subtotals and final columns.
REFERENCE_TOTALS: dict[tuple[str, str], tuple[float, ...]] = {
    (LOWER, "A"): (0.239221,) * 5,
    (LOWER, "C"): (0.491533, 0.420901, 0.372205, 0.299391, 0.256486),
    (LOWER, "total"): (0.969975, 0.899343, 0.850647, 0.777833, 0.734928),
    (LOWER, "bound"): (0.030025, 0.100657, 0.149353, 0.222167, 0.265072),
    (UPPER, "H"): (0.182012, 0.133815, 0.085930, 0.038334, 0.0),
    (UPPER, "A1"): (0.218374, 0.245073, 0.271888, 0.295614, 0.315540),
    (UPPER, "A1prime"): (0.353418, 0.342227, 0.333033, 0.321722, 0.315540),
    (UPPER, "A2"): (0.102865, 0.109021, 0.122256, 0.140969, 0.155383),
    (UPPER, "A2prime"): (0.201264, 0.195899, 0.187831, 0.173941, 0.155383),
    (UPPER, "C"): (0.704610, 0.622293, 0.562035, 0.489032, 0.433975),
    (UPPER, "total"): (1.762543, 1.648328, 1.562973, 1.459612, 1.375821),
    (UPPER, "bound"): (2.762543, 2.648328, 2.562973, 2.459612, 2.375821),
}
# The rounded bound columns of the main theorem.
THEOREM_LB = (0.0300, 0.1006, 0.1493, 0.2221, 0.2650)
THEOREM_UB = (2.7626, 2.6484, 2.5630, 2.4597, 2.3759)


def display_name(name: str) -> str:
    """'UC01' -> 'U_C01', 'VA4' -> 'V_A4', 'H' -> 'H'."""
    return name if len(name) < 2 or name[1] not in "AC" else f"{name[0]}_{name[1:]}"


def internal_name(name: str) -> str:
    """Accept 'U_C01', 'u_c01', 'UC01', ... and return the catalog key."""
    return name.replace("_", "").upper() if name.lower() != "afull" else "Afull"


def reference_value(name: str, theta: float) -> float | None:
    vals = REFERENCE_VALUES.get(name)
    for i, t in enumerate(REFERENCE_THETAS):
        if vals is not None and abs(t - theta) < 1e-12:
            return vals[i]
    return None


def groups_for(side: str) -> dict[str, tuple[str, ...]]:
    if side == LOWER:
        return LOWER_GROUPS
    if side == UPPER:
        return UPPER_GROUPS
    raise ValueError(f"side must be {LOWER!r} or {UPPER!r}")


def clamp_term(name: str, side: str, value: float, error: float) -> float:
    """Savings on the Lower side are dropped when not resolved above their error."""
    if side == LOWER and SIGNS[name] < 0 and value < error:
        return 0.0
    return value


def assemble(side: str, values: Mapping[str, float]) -> tuple[dict[str, float], float, float]:
    """Signed region sums, total loss and bound from per-term values (no clamp)."""
    groups = groups_for(side)
    mult = LOWER_MULT if side == LOWER else UPPER_MULT
    losses = {g: math.fsum(SIGNS[n] * values[n] for n in names) for g, names in groups.items()}
    total = math.fsum(mult[g] * losses[g] for g in groups)
    bound = 1.0 - total if side == LOWER else 1.0 + total
    return losses, total, bound


def consistency_check(theta_index: int = 0, digits: int = 6) -> dict[str, tuple[float, float, bool]]:
    """Feed the published term values through the signs; compare to published subtotals."""
    out = {}
    for side in (LOWER, UPPER):
        vals = {n: REFERENCE_VALUES[n][theta_index] for g in groups_for(side).values() for n in g}
        losses, total, bound = assemble(side, vals)
        computed = dict(losses, total=total, bound=bound)
        for key, got in computed.items():
            want = REFERENCE_TOTALS[(side, key)][theta_index]
            out[f"{side}:{key}"] = (got, want, round(got, digits) == round(want, digits))
    return out


@dataclass(frozen=True)
class Policy:
    """How each term is evaluated.  samples=None picks the default for its dimension."""

    method: str = "auto"
    tol: float = DEFAULT_TOL
    # V_C1-type indicators make 1e-6 cost hours in 3-d; 1e-4 keeps the 3-d terms near 10 min
    tol_3d: float = 1e-4
    adaptive_max_dim: int = 3   # "auto" sends dim <= this to adaptive quadrature
    samples: int | None = None
    seed: int = 42
    scheme: str = LOW_DISCREPANCY
    threads: int | None = None
    samples_low: int = 10**7     # dims 4-5
    samples_high: int = 10**8    # dims 6-8

    def tol_for(self, dim: int) -> float:
        return self.tol_3d if dim >= 3 else self.tol

    def method_for(self, dim: int) -> str:
        if self.method == "mc" or dim > 3:
            return "mc"
        if self.method == "adaptive":
            return "adaptive"
        return "adaptive" if dim <= self.adaptive_max_dim else "mc"

    def samples_for(self, dim: int) -> int:
        if self.samples is not None:
            return int(self.samples)
        return self.samples_low if dim <= 5 else self.samples_high

    def to_dict(self) -> dict:
        return {
            "method": self.method, "tol": self.tol, "tol_3d": self.tol_3d,
            "adaptive_max_dim": self.adaptive_max_dim, "samples": self.samples,
            "samples_low": self.samples_low, "samples_high": self.samples_high,
            "seed": self.seed, "scheme": self.scheme,
        }


def evaluate_term(spec: IntegralSpec, policy: Policy) -> IntegralEstimate:
    return integrate(spec, policy.method_for(spec.dim), samples=policy.samples_for(spec.dim),
                     seed=policy.seed, tol=policy.tol_for(spec.dim), scheme=policy.scheme,
                     threads=policy.threads)


@dataclass
class BoundReport:
    theta: float
    side: str
    per_term: dict[str, IntegralEstimate]
    region_losses: dict[str, float]
    total_loss: float
    bound: float
    combined_error: float
    status: str = "ok"                 # ok | trivial | inconclusive
    nonconverged: list[str] = field(default_factory=list)
    metadata: dict = field(default_factory=dict)

    @property
    def reportable(self) -> bool:
        return self.status == "ok"

    def to_dict(self) -> dict:
        return {
            "theta": self.theta,
            "side": self.side,
            "bound": self.bound,
            "total_loss": self.total_loss,
            "combined_error": self.combined_error,
            "status": self.status,
            "nonconverged": [display_name(n) for n in self.nonconverged],
            "region_losses": dict(self.region_losses),
            "per_term": {display_name(n): e.to_dict() for n, e in self.per_term.items()},
            "metadata": self.metadata,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2)


def report_from_estimates(theta: float, side: str, per_term: Mapping[str, IntegralEstimate],
                          metadata: dict | None = None) -> BoundReport:
    groups = groups_for(side)
    mult = LOWER_MULT if side == LOWER else UPPER_MULT
    used = {n: clamp_term(n, side, e.value, e.error) for n, e in per_term.items()}
    losses, total, bound = assemble(side, used)
    coef = {n: mult[g] for g, names in groups.items() for n in names}
    rss = math.fsum((coef[n] * e.error) ** 2 for n, e in per_term.items() if e.method != ADAPTIVE)
    lin = math.fsum(coef[n] * e.error for n, e in per_term.items() if e.method == ADAPTIVE)
    err = math.sqrt(rss) + lin
    status = "ok"
    if side == LOWER:
        margin = 1.0 - total
        if margin <= 0.0:
            status = "trivial"
        elif err >= margin:
            status = "inconclusive"
    nonconv = [n for n, e in per_term.items() if not e.converged]
    return BoundReport(theta, side, dict(per_term), losses, total, bound, err, status, nonconv,
                       dict(metadata or {}))


def _check_bound_theta(theta: float) -> None:
    if not BOUND_THETA_MIN <= theta < BOUND_THETA_MAX:
        raise ValueError(f"theta={theta} outside [{BOUND_THETA_MIN}, {BOUND_THETA_MAX})")


def compute_bound(theta: float, side: str, policy: Policy | None = None,
                  config: RegionConfig | None = None, names: Iterable[str] | None = None,
                  progress=None) -> BoundReport:
    """Evaluate every term of one side and assemble the report."""
    _check_bound_theta(theta)
    policy = policy or Policy()
    config = config or RegionConfig()
    wanted = set(names) if names is not None else None
    per_term = {}
    for spec in catalog(theta, side, config):
        if wanted is not None and spec.name not in wanted:
            continue
        per_term[spec.name] = evaluate_term(spec, policy)
        if progress is not None:
            progress(spec, per_term[spec.name])
    missing = [n for g in groups_for(side).values() for n in g if n not in per_term]
    if missing:
        raise ValueError(f"terms not evaluated: {missing}")
    meta = {"policy": policy.to_dict(), "config": config.__dict__.copy()}
    return report_from_estimates(theta, side, per_term, meta)


def lower_bound(theta: float, policy: Policy | None = None, config: RegionConfig | None = None,
                progress=None) -> BoundReport:
    return compute_bound(theta, LOWER, policy, config, progress=progress)


def upper_bound(theta: float, policy: Policy | None = None, config: RegionConfig | None = None,
                progress=None) -> BoundReport:
    return compute_bound(theta, UPPER, policy, config, progress=progress)


def table(theta_list: Iterable[float], policy: Policy | None = None,
          config: RegionConfig | None = None, sides=(LOWER, UPPER), progress=None) -> list[BoundReport]:
    reports = []
    for theta in theta_list:
        for side in sides:
            reports.append(compute_bound(theta, side, policy, config, progress=progress))
    return reports


def _fmt(x: float) -> str:
    return f"{x:.6g}"


def table_csv(reports: list[BoundReport]) -> str:
    """Rows as in the published tables: term name column, one column per theta."""
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    for side in (LOWER, UPPER):
        reps = [r for r in reports if r.side == side]
        if not reps:
            continue
        w.writerow([side] + [_fmt(r.theta) for r in reps])
        for region, names in groups_for(side).items():
            for n in names:
                if n != region:
                    w.writerow([display_name(n)] + [_fmt(r.per_term[n].value) for r in reps])
            w.writerow([f"Loss from {region}"] + [_fmt(r.region_losses[region]) for r in reps])
        w.writerow(["Total Loss"] + [_fmt(r.total_loss) for r in reps])
        w.writerow([f"{side} Bound"] + [_fmt(r.bound) for r in reps])
        w.writerow(["Combined Error"] + [_fmt(r.combined_error) for r in reps])
        w.writerow(["Status"] + [r.status for r in reps])
    return buf.getvalue()
