"""Numerical integration of catalog terms.

dim <= 3: nested adaptive Gauss-Kronrod.  The innermost variable locates indicator
jumps by bisection and integrates the smooth pieces; outer variables use global
adaptive subdivision on the error estimate.

dim >= 4: Monte Carlo (or scrambled Sobol) sampling of each variable uniformly in its
interval given the earlier ones, with the product of interval lengths as the
Jacobian.  Batches use independent counter-based streams so results do not depend
on thread scheduling.
"""

from __future__ import annotations

import math
import os
import time
import warnings
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np
from numba import njit
from scipy.stats import qmc

from .integrals import IntegralSpec, integrand_kernel, interval, weight_kernel
from .regions import composite

ADAPTIVE = "Adaptive"
MC = "MC"
QMC = "QMC"

PRNG = "PRNG"
LOW_DISCREPANCY = "LowDiscrepancy"

DEFAULT_TOL = 1e-6
DEFAULT_SAMPLES = 10**7
DEFAULT_BATCHES = 32
DEPTH_CAP = 40


class NonConvergence(RuntimeWarning):
    """Adaptive subdivision hit its depth or interval cap before reaching the tolerance."""


class DegenerateDomain(RuntimeWarning):
    """The outermost integration interval is empty."""


@dataclass(frozen=True)
class IntegralEstimate:
    value: float
    error: float            # std_error for MC/QMC, abs_error_bound for Adaptive
    method: str
    samples: int = 0
    seed: int = 0
    wall_time: float = 0.0
    converged: bool = True
    hits: int = 0           # samples inside the indicator (MC/QMC)

    @property
    def std_error(self) -> float:
        return self.error

    @property
    def abs_error_bound(self) -> float:
        return self.error

    def to_dict(self) -> dict:
        return {
            "value": self.value,
            "error": self.error,
            "method": self.method,
            "samples": self.samples,
            "seed": self.seed,
            "wall_time": self.wall_time,
            "converged": self.converged,
        }


# ---------------------------------------------------------------------------
# Gauss-Kronrod 7/15
# ---------------------------------------------------------------------------

_XGK = np.array([
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.0,
])
_WGK = np.array([
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714,
])
_WG = np.array([
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327,
])

_N_SCAN = 64        # indicator scan cells on the innermost variable
_BISECT = 52
_MAX_INTERVALS = 2000


@njit(cache=True)
def _nodes(a, b):
    c = 0.5 * (a + b)
    h = 0.5 * (b - a)
    x = np.empty(15)
    for j in range(7):
        x[2 * j] = c - h * _XGK[j]
        x[2 * j + 1] = c + h * _XGK[j]
    x[14] = c
    return x, h


@njit(cache=True)
def _gk_combine(f, h):
    # f laid out as in _nodes
    k = _WGK[7] * f[14]
    g = _WG[3] * f[14]
    for j in range(7):
        k += _WGK[j] * (f[2 * j] + f[2 * j + 1])
        if j % 2 == 1:
            g += _WG[j // 2] * (f[2 * j] + f[2 * j + 1])
    return k * h, abs(k - g) * h


@njit(cache=True)
def _weight_at(t, i, x, fnum, fden, fkind, pw):
    t[i] = x
    return weight_kernel(t, fnum, fden, fkind, pw)


@njit(cache=True)
def _smooth_piece(t, i, a, b, tol, fnum, fden, fkind, pw):
    """Adaptive GK of the weight alone over [a, b] (indicator constant there)."""
    sa = np.empty(_MAX_INTERVALS)
    sb = np.empty(_MAX_INTERVALS)
    sd = np.empty(_MAX_INTERVALS, dtype=np.int64)
    top = 0
    sa[0] = a
    sb[0] = b
    sd[0] = 0
    top = 1
    total = 0.0
    err = 0.0
    f = np.empty(15)
    while top > 0:
        top -= 1
        lo = sa[top]
        hi = sb[top]
        dep = sd[top]
        x, h = _nodes(lo, hi)
        for j in range(15):
            f[j] = _weight_at(t, i, x[j], fnum, fden, fkind, pw)
        v, e = _gk_combine(f, h)
        local_tol = tol * (hi - lo) / (b - a)
        if e <= max(local_tol, 1e-15 * abs(v)) or dep >= DEPTH_CAP or top + 2 >= _MAX_INTERVALS:
            total += v
            err += e
        else:
            m = 0.5 * (lo + hi)
            sa[top] = lo
            sb[top] = m
            sd[top] = dep + 1
            sa[top + 1] = m
            sb[top + 1] = hi
            sd[top + 1] = dep + 1
            top += 2
    # judged on the total: a jump of the weight (omega_1 at u = 4) never meets a local tol
    ok = err <= max(tol, 1e-15 * abs(total))
    return total, err, ok


@njit(cache=True)
def _inner(t, i, tol, lo, nlo, hi, nhi, fnum, fden, fkind, pw, pid, tb):
    """Integral over the last variable: locate indicator jumps, integrate the pieces."""
    a, b = interval(i, t, lo, nlo, hi, nhi)
    if not b > a:
        return 0.0, 0.0, True
    n = _N_SCAN
    w = (b - a) / n
    ind = np.empty(n, dtype=np.bool_)
    for j in range(n):
        t[i] = a + (j + 0.5) * w
        ind[j] = composite(pid, t, tb)
    total = 0.0
    err = 0.0
    ok = True
    start = a
    state = ind[0]
    for j in range(1, n + 1):
        if j < n and ind[j] == state:
            continue
        if j < n:
            # jump between consecutive scan points: bisect
            x0 = a + (j - 0.5) * w
            x1 = a + (j + 0.5) * w
            for _ in range(_BISECT):
                xm = 0.5 * (x0 + x1)
                t[i] = xm
                if composite(pid, t, tb) == state:
                    x0 = xm
                else:
                    x1 = xm
            end = 0.5 * (x0 + x1)
        else:
            end = b
        if state and end > start:
            v, e, good = _smooth_piece(t, i, start, end, tol * (end - start) / (b - a),
                                       fnum, fden, fkind, pw)
            total += v
            err += e
            ok = ok and good
        if j < n:
            start = end
            state = ind[j]
    return total, err, ok


@njit(cache=True)
def _gk_node_values(level, dim, t, saved, a, b, child_tol,
                    lo, nlo, hi, nhi, fnum, fden, fkind, pw, pid, tb):
    """GK15 on [a, b] for variable `level`, each node value an integral over the rest."""
    x, h = _nodes(a, b)
    f = np.empty(15)
    ok = True
    for j in range(15):
        for r in range(level):
            t[r] = saved[r]
        t[level] = x[j]
        if level + 1 == dim - 1:
            v, e, good = _inner(t, level + 1, child_tol, lo, nlo, hi, nhi,
                                fnum, fden, fkind, pw, pid, tb)
        else:
            v, e, good = _adapt_level2(level + 1, dim, t, child_tol, lo, nlo, hi, nhi,
                                       fnum, fden, fkind, pw, pid, tb)
        ok = ok and good
        f[j] = v
    v, e = _gk_combine(f, h)
    return v, e, ok


@njit(cache=True)
def _gk_node_values2(level, dim, t, saved, a, b, child_tol,
                     lo, nlo, hi, nhi, fnum, fden, fkind, pw, pid, tb):
    # same as _gk_node_values, for a level whose children are innermost integrals
    x, h = _nodes(a, b)
    f = np.empty(15)
    ok = True
    for j in range(15):
        for r in range(level):
            t[r] = saved[r]
        t[level] = x[j]
        v, e, good = _inner(t, level + 1, child_tol, lo, nlo, hi, nhi,
                            fnum, fden, fkind, pw, pid, tb)
        ok = ok and good
        f[j] = v
    v, e = _gk_combine(f, h)
    return v, e, ok


@njit(cache=True)
def _adapt_level(level, dim, t, tol, lo, nlo, hi, nhi, fnum, fden, fkind, pw, pid, tb):
    """Global adaptive GK over variable `level` (children: adaptive or innermost)."""
    a, b = interval(level, t, lo, nlo, hi, nhi)
    if not b > a:
        return 0.0, 0.0, True
    sa = np.empty(_MAX_INTERVALS)
    sb = np.empty(_MAX_INTERVALS)
    sv = np.empty(_MAX_INTERVALS)
    se = np.empty(_MAX_INTERVALS)
    sd = np.empty(_MAX_INTERVALS, dtype=np.int64)
    child_tol = 0.1 * tol / (b - a)
    saved = t.copy()
    sa[0] = a
    sb[0] = b
    sd[0] = 0
    sv[0], se[0], ok = _gk_node_values(level, dim, t, saved, a, b, child_tol,
                                       lo, nlo, hi, nhi, fnum, fden, fkind, pw, pid, tb)
    count = 1
    while True:
        total = 0.0
        etot = 0.0
        worst = -1
        wval = -1.0
        for q in range(count):
            total += sv[q]
            etot += se[q]
            if se[q] > wval and sd[q] < DEPTH_CAP:
                wval = se[q]
                worst = q
        if etot <= tol:
            break
        if worst < 0 or count >= _MAX_INTERVALS:
            ok = False
            break
        l0 = sa[worst]
        r1 = sb[worst]
        m = 0.5 * (l0 + r1)
        dep = sd[worst] + 1
        v1, e1, g1 = _gk_node_values(level, dim, t, saved, l0, m, child_tol,
                                     lo, nlo, hi, nhi, fnum, fden, fkind, pw, pid, tb)
        v2, e2, g2 = _gk_node_values(level, dim, t, saved, m, r1, child_tol,
                                     lo, nlo, hi, nhi, fnum, fden, fkind, pw, pid, tb)
        ok = ok and g1 and g2
        sb[worst] = m
        sv[worst] = v1
        se[worst] = e1
        sd[worst] = dep
        sa[count] = m
        sb[count] = r1
        sv[count] = v2
        se[count] = e2
        sd[count] = dep
        count += 1
    for r in range(level):
        t[r] = saved[r]
    return total, etot, ok


@njit(cache=True)
def _adapt_level2(level, dim, t, tol, lo, nlo, hi, nhi, fnum, fden, fkind, pw, pid, tb):
    # same as _adapt_level, for a level whose children are innermost integrals
    a, b = interval(level, t, lo, nlo, hi, nhi)
    if not b > a:
        return 0.0, 0.0, True
    sa = np.empty(_MAX_INTERVALS)
    sb = np.empty(_MAX_INTERVALS)
    sv = np.empty(_MAX_INTERVALS)
    se = np.empty(_MAX_INTERVALS)
    sd = np.empty(_MAX_INTERVALS, dtype=np.int64)
    child_tol = 0.1 * tol / (b - a)
    saved = t.copy()
    sa[0] = a
    sb[0] = b
    sd[0] = 0
    sv[0], se[0], ok = _gk_node_values2(level, dim, t, saved, a, b, child_tol,
                                        lo, nlo, hi, nhi, fnum, fden, fkind, pw, pid, tb)
    count = 1
    while True:
        total = 0.0
        etot = 0.0
        worst = -1
        wval = -1.0
        for q in range(count):
            total += sv[q]
            etot += se[q]
            if se[q] > wval and sd[q] < DEPTH_CAP:
                wval = se[q]
                worst = q
        if etot <= tol:
            break
        if worst < 0 or count >= _MAX_INTERVALS:
            ok = False
            break
        l0 = sa[worst]
        r1 = sb[worst]
        m = 0.5 * (l0 + r1)
        dep = sd[worst] + 1
        v1, e1, g1 = _gk_node_values2(level, dim, t, saved, l0, m, child_tol,
                                      lo, nlo, hi, nhi, fnum, fden, fkind, pw, pid, tb)
        v2, e2, g2 = _gk_node_values2(level, dim, t, saved, m, r1, child_tol,
                                      lo, nlo, hi, nhi, fnum, fden, fkind, pw, pid, tb)
        ok = ok and g1 and g2
        sb[worst] = m
        sv[worst] = v1
        se[worst] = e1
        sd[worst] = dep
        sa[count] = m
        sb[count] = r1
        sv[count] = v2
        se[count] = e2
        sd[count] = dep
        count += 1
    for r in range(level):
        t[r] = saved[r]
    return total, etot, ok


@njit(cache=True)
def _adaptive_entry(dim, tol, lo, nlo, hi, nhi, fnum, fden, fkind, pw, pid, tb):
    t = np.zeros(dim)
    if dim == 1:
        return _inner(t, 0, tol, lo, nlo, hi, nhi, fnum, fden, fkind, pw, pid, tb)
    if dim == 2:
        return _adapt_level2(0, dim, t, tol, lo, nlo, hi, nhi, fnum, fden, fkind, pw, pid, tb)
    return _adapt_level(0, dim, t, tol, lo, nlo, hi, nhi, fnum, fden, fkind, pw, pid, tb)


def _outer_empty(spec: IntegralSpec) -> bool:
    lo, nlo, hi, nhi, *_ = spec.packed()
    a, b = interval(0, np.zeros(spec.dim), lo, nlo, hi, nhi)
    return not b > a


def integrate_adaptive(spec: IntegralSpec, tol: float = DEFAULT_TOL) -> IntegralEstimate:
    """Deterministic nested quadrature for dim <= 3 (sign not applied)."""
    if spec.dim > 3:
        raise ValueError("adaptive quadrature supports dim <= 3")
    if not tol > 0:
        raise ValueError("tol must be positive")
    start = time.perf_counter()
    if _outer_empty(spec):
        return IntegralEstimate(0.0, 0.0, ADAPTIVE, wall_time=time.perf_counter() - start)
    lo, nlo, hi, nhi, fnum, fden, fkind, pw, pid = spec.packed()
    v, e, ok = _adaptive_entry(spec.dim, tol, lo, nlo, hi, nhi, fnum, fden, fkind, pw, pid,
                               spec.tables.pack)
    if not ok or e > tol:
        warnings.warn(f"{spec.name}: adaptive quadrature did not reach tol {tol:g} "
                      f"(estimate {e:.3g})", NonConvergence, stacklevel=2)
    return IntegralEstimate(float(v), float(e), ADAPTIVE, wall_time=time.perf_counter() - start,
                            converged=bool(ok and e <= tol))


# ---------------------------------------------------------------------------
# Monte Carlo
# ---------------------------------------------------------------------------

_CHUNK = 1 << 15


@njit(cache=True, nogil=True)
def _mc_chunk(u, lo, nlo, hi, nhi, fnum, fden, fkind, pw, pid, tb):
    n, d = u.shape
    t = np.zeros(d)
    s = 0.0
    hits = 0
    for k in range(n):
        jac = 1.0
        inside = True
        for i in range(d):
            a, b = interval(i, t, lo, nlo, hi, nhi)
            if not b > a:
                inside = False
                break
            t[i] = a + (b - a) * u[k, i]
            jac *= b - a
        if inside:
            v = integrand_kernel(t, fnum, fden, fkind, pw, pid, tb)
            if v > 0.0:
                s += jac * v
                hits += 1
    return s, hits


def _batch(spec_arrays, tb, dim, n, seed, index, scheme):
    seq = np.random.SeedSequence([seed & 0xFFFFFFFFFFFFFFFF, index])
    if scheme == LOW_DISCREPANCY:
        engine = qmc.Sobol(d=dim, scramble=True, seed=np.random.Generator(np.random.Philox(seq)))
        draw = engine.random
    else:
        gen = np.random.Generator(np.random.Philox(seq))
        draw = lambda m: gen.random((m, dim))  # noqa: E731
    total = 0.0
    hits = 0
    done = 0
    with warnings.catch_warnings():
        # chunk sizes are powers of two; only a short tail may break Sobol balance
        warnings.simplefilter("ignore", UserWarning)
        while done < n:
            m = min(_CHUNK, n - done)
            s, h = _mc_chunk(draw(m), *spec_arrays, tb)
            total += s
            hits += h
            done += m
    return total / n, hits


def default_threads() -> int:
    env = os.environ.get("SIEVE_BOUNDS_THREADS")
    if env:
        return max(1, int(env))
    return max(1, os.cpu_count() or 1)


def integrate_mc(spec: IntegralSpec, samples: int = DEFAULT_SAMPLES, seed: int = 0,
                 scheme: str = LOW_DISCREPANCY, batches: int = DEFAULT_BATCHES,
                 threads: int | None = None) -> IntegralEstimate:
    """Batched (quasi-)Monte Carlo estimate with batch-mean standard error (sign not applied)."""
    if samples < 10**4:
        raise ValueError("samples must be at least 1e4")
    if batches < 32:
        raise ValueError("at least 32 batches are needed for the error estimate")
    if scheme not in (PRNG, LOW_DISCREPANCY):
        raise ValueError(f"unknown scheme {scheme!r}")
    start = time.perf_counter()
    method = QMC if scheme == LOW_DISCREPANCY else MC
    if _outer_empty(spec):
        warnings.warn(f"{spec.name}: empty outer interval", DegenerateDomain, stacklevel=2)
        return IntegralEstimate(0.0, 0.0, method, samples, seed, time.perf_counter() - start)
    per = samples // batches
    if scheme == LOW_DISCREPANCY:
        per = 1 << max(0, math.ceil(math.log2(per)))
    arrays = spec.packed()
    tb = spec.tables.pack
    threads = threads or default_threads()
    job = lambda b: _batch(arrays, tb, spec.dim, per, seed, b, scheme)  # noqa: E731
    if threads == 1:
        results = [job(b) for b in range(batches)]
    else:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            results = list(pool.map(job, range(batches)))
    means = np.array([r[0] for r in results])
    hits = int(sum(r[1] for r in results))
    value = float(means.mean())
    err = float(means.std(ddof=1) / math.sqrt(batches))
    return IntegralEstimate(value, err, method, per * batches, seed,
                            time.perf_counter() - start, hits=hits)


def integrate(spec: IntegralSpec, policy: str = "auto", samples: int = DEFAULT_SAMPLES,
              seed: int = 0, tol: float = DEFAULT_TOL, scheme: str = LOW_DISCREPANCY,
              threads: int | None = None) -> IntegralEstimate:
    """Dispatch: 'auto' (dim <= 3 adaptive, else MC), 'adaptive', or 'mc'."""
    if policy == "auto":
        policy = "adaptive" if spec.dim <= 3 else "mc"
    if policy in ("adaptive", "force_adaptive"):
        return integrate_adaptive(spec, tol)
    if policy in ("mc", "force_mc"):
        return integrate_mc(spec, samples, seed, scheme, threads=threads)
    raise ValueError(f"unknown policy {policy!r}")
