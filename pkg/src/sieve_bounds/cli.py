"""Command-line front end: bounds, single integrals, region grids, self-test."""

from __future__ import annotations

import argparse
import csv
import io
import json
import os
import sys
import warnings
from importlib.metadata import PackageNotFoundError, version

import numpy as np

from . import bounds as bd
from .integrals import LOWER, UPPER, find_spec
from .quadrature import LOW_DISCREPANCY, PRNG, DegenerateDomain, NonConvergence
from .regions import G_ROLES, G_ROLES_ALL, G_SETS_FULL, G_SETS_PUBLISHED, RegionConfig, in_region, region_arity, tables_for
from .sieve_params import THETA_MAX, THETA_MIN

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_FLAGGED = 2


def artifact_version() -> str:
    try:
        return version("sieve_bounds")
    except PackageNotFoundError:
        return "0+unknown"


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    # usage errors exit with 1, not argparse's 2 (2 is reserved for flagged results)
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _number(text: str) -> float:
    try:
        return float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a number: {text!r}") from None


def _count(text: str) -> int:
    v = _number(text)
    if v != int(v) or v <= 0:
        raise argparse.ArgumentTypeError(f"not a positive integer: {text!r}")
    return int(v)


def _add_config_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--dstar-extended", action=argparse.BooleanOptionalAction, default=True,
                   help="accept D0 partitions licensed by the protrusion remark (default on)")
    p.add_argument("--eq13-bound-as-printed", action=argparse.BooleanOptionalAction, default=True,
                   help="use the printed upper limit in the U_C13 integral (default on)")
    p.add_argument("--g-sets", choices=(G_SETS_PUBLISHED, G_SETS_FULL), default=G_SETS_PUBLISHED,
                   help="which lemmas define G_n for n >= 3")
    p.add_argument("--g-roles", choices=G_ROLES, default=G_ROLES_ALL,
                   help="which factors G-lifts may group (default: all, remainder included)")


def _add_policy_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--method", choices=("auto", "adaptive", "mc"), default="auto",
                   help="auto: adaptive for dim <= 3, else MC; adaptive always falls back "
                        "to MC above dim 3")
    p.add_argument("--samples", type=_count, default=None,
                   help="MC samples for every term (default: per-dimension)")
    p.add_argument("--samples-low", type=_count, default=10**7, help="MC samples for dims 4-5")
    p.add_argument("--samples-high", type=_count, default=10**8, help="MC samples for dims 6-8")
    p.add_argument("--seed", type=int, default=42)
    p.add_argument("--scheme", choices=("qmc", "prng"), default="qmc")
    p.add_argument("--tol", type=_number, default=1e-6, help="adaptive tolerance (dims 1-2)")
    p.add_argument("--tol-3d", type=_number, default=1e-4, help="adaptive tolerance (dim 3)")
    p.add_argument("--threads", type=_count, default=None,
                   help="batch threads (default: $SIEVE_BOUNDS_THREADS or 1)")


def _config(args) -> RegionConfig:
    return RegionConfig(dstar_extended=args.dstar_extended,
                        eq13_bound_as_printed=args.eq13_bound_as_printed,
                        g_sets=args.g_sets, g_roles=args.g_roles)


def _policy(args) -> bd.Policy:
    return bd.Policy(method=args.method, tol=args.tol, tol_3d=args.tol_3d, samples=args.samples, seed=args.seed,
                     scheme=LOW_DISCREPANCY if args.scheme == "qmc" else PRNG,
                     threads=args.threads, samples_low=args.samples_low,
                     samples_high=args.samples_high)


def _metadata(args, config: RegionConfig, policy: bd.Policy | None = None, **extra) -> dict:
    meta = {"artifact_version": artifact_version(), "command": args.command,
            "config": dict(config.__dict__)}
    if policy is not None:
        meta["policy"] = policy.to_dict()
    meta.update(extra)
    return meta


def _emit(text: str, out: str | None) -> None:
    if out is None or out == "-":
        sys.stdout.write(text)
        if not text.endswith("\n"):
            sys.stdout.write("\n")
        return
    with open(out, "w", encoding="utf-8", newline="") as fh:
        fh.write(text)


def _format_for(args) -> str:
    if args.format:
        return args.format
    if args.out and args.out.endswith(".csv"):
        return "csv"
    return "json"


def _check_theta(theta: float, lo: float, hi: float, closed: bool = True) -> None:
    ok = lo <= theta <= hi if closed else lo <= theta < hi
    if not ok:
        raise UsageError(f"theta={theta} outside the supported range [{lo}, {hi}{']' if closed else ')'}")


def _csv_metadata(meta: dict) -> str:
    return f"# {json.dumps(meta, sort_keys=True)}\n"


# ---------------------------------------------------------------------------
# commands
# ---------------------------------------------------------------------------

def cmd_compute(args) -> int:
    thetas = args.theta_list if args.theta_list else [args.theta]
    for th in thetas:
        _check_theta(th, bd.BOUND_THETA_MIN, bd.BOUND_THETA_MAX, closed=False)
    sides = {"lower": (LOWER,), "upper": (UPPER,), "both": (LOWER, UPPER)}[args.side]
    config = _config(args)
    policy = _policy(args)

    def progress(spec, est):
        if args.verbose:
            print(f"  {bd.display_name(spec.name):>6} theta={spec.theta:g} value={est.value:.6g} "
                  f"err={est.error:.2g} {est.method} {est.wall_time:.1f}s", file=sys.stderr)

    with warnings.catch_warnings():
        warnings.simplefilter("ignore", NonConvergence)
        warnings.simplefilter("ignore", DegenerateDomain)    # H is empty above 11/21
        reports = bd.table(thetas, policy, config, sides, progress=progress)
    meta = _metadata(args, config, policy, thetas=thetas)
    for r in reports:
        r.metadata = meta
    if _format_for(args) == "csv":
        text = _csv_metadata(meta) + bd.table_csv(reports)
    else:
        doc = [r.to_dict() for r in reports]
        text = json.dumps(doc[0] if len(doc) == 1 else doc, indent=2)
    _emit(text, args.out)
    flagged = any(r.nonconverged for r in reports)
    return EXIT_FLAGGED if flagged else EXIT_OK


def cmd_integral(args) -> int:
    _check_theta(args.theta, THETA_MIN, THETA_MAX)
    name = bd.internal_name(args.name)
    config = _config(args)
    try:
        spec = find_spec(args.theta, name, config)
    except ValueError:
        raise UsageError(f"unknown integral {args.name!r}") from None
    policy = _policy(args)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", NonConvergence)
        est = bd.evaluate_term(spec, policy)
    doc = {"name": bd.display_name(name), "theta": args.theta, "dim": spec.dim,
           "sign": spec.sign, **est.to_dict(),
           "reference": bd.reference_value(name, args.theta),
           "metadata": _metadata(args, config, policy)}
    if _format_for(args) == "csv":
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["name", "theta", "value", "error", "method", "samples", "seed"])
        w.writerow([doc["name"], f"{args.theta:.6g}", f"{est.value:.6g}", f"{est.error:.6g}",
                    est.method, est.samples, est.seed])
        text = _csv_metadata(doc["metadata"]) + buf.getvalue()
    else:
        text = json.dumps(doc, indent=2)
    _emit(text, args.out)
    return EXIT_OK if est.converged else EXIT_FLAGGED


def region_grid(name: str, theta: float, grid: int, pins: dict[int, float],
                lo: float = 0.0, hi: float = 0.5, config: RegionConfig | None = None):
    """Membership over a grid x grid lattice of cell centres (grid points for arity 1).

    pins maps 1-based coordinate index to its fixed value; the two free coordinates
    are the lowest unpinned ones.
    """
    arity = region_arity(name)
    free = [i for i in range(1, arity + 1) if i not in pins]
    if any(i < 1 or i > arity for i in pins):
        raise UsageError(f"{name} has {arity} coordinates; pin index out of range")
    if len(free) != min(arity, 2):
        raise UsageError(f"{name} has {arity} coordinates: pin all but {min(arity, 2)}")
    tables = tables_for(theta, config)
    axis = lo + (np.arange(grid) + 0.5) * (hi - lo) / grid
    t = np.zeros(arity)
    for i, v in pins.items():
        t[i - 1] = v

    def member(point) -> int:
        try:
            return int(in_region(tables, point, name))
        except ValueError:
            return 0        # outside the simplex

    if len(free) == 1:
        for x in axis:
            t[free[0] - 1] = x
            yield (x, member(t))
        return
    for x in axis:
        t[free[0] - 1] = x
        for y in axis:
            t[free[1] - 1] = y
            yield (x, y, member(t))


def cmd_region_grid(args) -> int:
    _check_theta(args.theta, THETA_MIN, THETA_MAX)
    pins = {}
    for item in args.pin or ():
        key, _, val = item.partition("=")
        try:
            pins[int(key)] = float(val)
        except ValueError:
            raise UsageError(f"bad pin {item!r}; expected INDEX=VALUE") from None
    try:
        arity = region_arity(args.region)
    except ValueError:
        raise UsageError(f"unknown region {args.region!r}") from None
    config = _config(args)
    rows = region_grid(args.region, args.theta, args.grid, pins, args.lo, args.hi, config)
    buf = io.StringIO()
    buf.write(_csv_metadata(_metadata(args, config, region=args.region, theta=args.theta,
                                      grid=args.grid, pins=pins, range=[args.lo, args.hi])))
    w = csv.writer(buf, lineterminator="\n")
    free = [i for i in range(1, arity + 1) if i not in pins]
    w.writerow([f"t{i}" for i in free] + ["in_region"])
    for row in rows:
        w.writerow([f"{v:.6g}" for v in row[:-1]] + [row[-1]])
    _emit(buf.getvalue(), args.out)
    return EXIT_OK


def cmd_selftest(args) -> int:
    from .selftest import run_selftest
    config = _config(args)
    results = run_selftest(config, fault=args.inject_fault)
    failed = 0
    for name, ok, detail in results:
        print(f"{'PASS' if ok else 'FAIL'} {name}{': ' + detail if detail else ''}")
        failed += not ok
    print(f"{len(results) - failed}/{len(results)} checks passed")
    return EXIT_OK if failed == 0 else EXIT_FLAGGED


# ---------------------------------------------------------------------------
# parser
# ---------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="sieve-bounds",
                     description="Numerical lower/upper bounds for primes in short intervals.")
    parser.add_argument("--version", action="version", version=artifact_version())
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("compute", help="assemble LB(theta) and/or UB(theta)")
    g = p.add_mutually_exclusive_group()
    g.add_argument("--theta", type=_number, default=0.52)
    g.add_argument("--theta-list", type=_number, nargs="+")
    p.add_argument("--side", choices=("lower", "upper", "both"), default="both")
    p.add_argument("--format", choices=("json", "csv"))
    p.add_argument("--out", help="output path (default stdout)")
    p.add_argument("-v", "--verbose", action="store_true", help="per-term progress on stderr")
    _add_policy_flags(p)
    _add_config_flags(p)
    p.set_defaults(func=cmd_compute)

    p = sub.add_parser("integral", help="evaluate one named integral")
    p.add_argument("name", help="e.g. U_C01, V_A4, H")
    p.add_argument("--theta", type=_number, default=0.52)
    p.add_argument("--format", choices=("json", "csv"))
    p.add_argument("--out")
    _add_policy_flags(p)
    _add_config_flags(p)
    p.set_defaults(func=cmd_integral)

    p = sub.add_parser("region-grid", help="export a membership grid of a region")
    p.add_argument("region", help="region id, e.g. A, H, G2, Dplus, UC01")
    p.add_argument("--theta", type=_number, default=0.52)
    p.add_argument("--grid", type=_count, default=200)
    p.add_argument("--pin", action="append", metavar="INDEX=VALUE",
                   help="fix coordinate INDEX (1-based); repeat as needed")
    p.add_argument("--lo", type=_number, default=0.0)
    p.add_argument("--hi", type=_number, default=0.5)
    p.add_argument("--out")
    _add_config_flags(p)
    p.set_defaults(func=cmd_region_grid)

    p = sub.add_parser("selftest", help="run invariant checks and the table consistency sums")
    p.add_argument("--inject-fault", choices=("gamma",), default=None, help=argparse.SUPPRESS)
    _add_config_flags(p)
    p.set_defaults(func=cmd_selftest)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if getattr(args, "threads", None) is None and "SIEVE_BOUNDS_THREADS" in os.environ:
        try:
            args.threads = _count(os.environ["SIEVE_BOUNDS_THREADS"])
        except argparse.ArgumentTypeError as exc:
            print(f"sieve-bounds: error: SIEVE_BOUNDS_THREADS: {exc}", file=sys.stderr)
            return EXIT_USAGE
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"sieve-bounds: error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
