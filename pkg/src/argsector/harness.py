"""Experiments: radius searches, sector sweeps and empirical constants."""
from __future__ import annotations

import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .arcs import main_lemma_check
from .circle import (
    TraceError,
    UnsupportedRepresentation,
    doubling_exponent,
    guard_radius,
    omega_big,
    omega_small,
    trace_circle,
)
from .functions import TWO_PI, AnalyticFunction, eval_log, fryntov_truncation_bound
from .sectors import Sector, area_adaptive_many, sector_grid

DEFAULT_OPENINGS = (math.pi / 6, math.pi / 2, math.pi)
DEFAULT_ROTATIONS = 24


class PreconditionError(ValueError):
    """Inputs violate the hypotheses an experiment requires."""


def thread_count() -> int:
    """Worker count, capped by ``ARGSECTOR_THREADS`` when set."""
    n = os.cpu_count() or 1
    env = os.environ.get("ARGSECTOR_THREADS")
    if env:
        try:
            n = min(n, max(1, int(env)))
        except ValueError:
            pass
    return n


# --------------------------------------------------------------------------
# radius searches
# --------------------------------------------------------------------------

def _omega(f: AnalyticFunction, r: float) -> float:
    if f.explicit_zeros:
        return omega_big(f, r).omega
    return omega_small(trace_circle(f, r))[0]


def thm1_conditions(f: AnalyticFunction, r: float, rho: float, t_samples: int = 8):
    """``(Omega(2r) <= 2^{2 rho} Omega(r), min omega(t) > 2 pi on [r, 2r])`` at one radius."""
    big_r = omega_big(f, r).omega_big
    big_2r = omega_big(f, 2.0 * r).omega_big
    eps = 1e-6 * (1.0 + big_2r)
    growth = big_2r <= 2.0 ** (2.0 * rho) * big_r + eps
    if not growth:
        return False, False
    ts = np.linspace(r, 2.0 * r, t_samples)
    wide = all(_omega(f, float(t)) > TWO_PI for t in ts)
    return growth, wide


def find_thm1_radii(f: AnalyticFunction, rho: float, r_min: float, r_max: float,
                    samples: int, t_samples: int = 8) -> list:
    """Sampled radii in ``[r_min, r_max]`` meeting both radius conditions."""
    if not rho > 0:
        raise PreconditionError("rho must be positive")
    if not 0 < r_min <= r_max:
        raise PreconditionError("need 0 < r_min <= r_max")
    if not 2.0 * r_max < f.domain_radius:
        raise PreconditionError("2 r_max must lie inside the domain")
    out = []
    for r in np.linspace(r_min, r_max, samples):
        growth, wide = thm1_conditions(f, float(r), rho, t_samples)
        if growth and wide:
            out.append(float(r))
    return out


def select_radius_order_zero(f: AnalyticFunction, delta: float, U: float):
    """``(r_delta, U^2 r_delta)`` where ``r_delta`` maximizes ``n(r)/r^delta``.

    Only the zero moduli can be maximizers since ``n`` is a step function;
    ties go to the largest radius.  For ``1 + p`` the zeros of ``p`` are used.
    """
    if not 0 < delta < 1:
        raise PreconditionError("delta must lie in (0, 1)")
    if not U > 1:
        raise PreconditionError("U must exceed 1")
    mods = f.zero_moduli
    mods = mods[mods > 0]
    if mods.size == 0:
        raise PreconditionError("no nonzero zeros to choose a radius from")
    all_mods = np.abs(f.zeros)
    cand = np.unique(mods)
    counts = np.array([f.multiplicities[all_mods <= c].sum() for c in cand], dtype=float)
    logv = np.log(counts) - delta * np.log(cand)
    best = logv.max()
    ties = np.flatnonzero(logv >= best - 1e-12 * max(1.0, abs(best)))
    r_delta = float(cand[ties[-1]])
    return r_delta, U * U * r_delta


# --------------------------------------------------------------------------
# sweeps
# --------------------------------------------------------------------------

CSV_HEADER = "r,theta1,alpha,areaLow,areaHigh,omega,omegaBig,beta"


@dataclass
class SweepRow:
    r: float
    sector: Sector
    area_low: float
    area_high: float
    omega: float
    omega_big: float
    beta: float
    certified: bool
    flags: tuple = ()

    def csv_fields(self) -> list:
        return [self.r, self.sector.theta1, self.sector.alpha, self.area_low,
                self.area_high, self.omega, self.omega_big, self.beta]


@dataclass
class SweepTable:
    function_id: str
    rows: list
    metadata: dict = field(default_factory=dict)

    @property
    def radii(self) -> list:
        seen = []
        for row in self.rows:
            if not seen or seen[-1] != row.r:
                seen.append(row.r)
        return seen

    def to_csv(self) -> str:
        lines = [CSV_HEADER]
        for row in self.rows:
            lines.append(",".join(repr(float(v)) for v in row.csv_fields()))
        return "\n".join(lines) + "\n"


def _radius_rows(f: AnalyticFunction, r: float, sectors: list, err_budget: float) -> list:
    flags = []
    nan = float("nan")
    try:
        rg = guard_radius(f, r)
    except TraceError:
        rg = r
    if rg != r:
        flags.append("nudged")
    try:
        if f.explicit_zeros:
            rep = omega_big(f, rg)
            om, big = rep.omega, rep.omega_big
        else:
            om, big = omega_small(trace_circle(f, rg))[0], nan
            flags.append("omega_big_unsupported")
    except (TraceError, UnsupportedRepresentation, ArithmeticError) as exc:
        om = big = nan
        flags.append(f"omega_failed:{type(exc).__name__}")
    try:
        beta = doubling_exponent(f, r)[0]
    except (ArithmeticError, ValueError) as exc:
        beta = nan
        flags.append(f"beta_failed:{type(exc).__name__}")
    try:
        ests = area_adaptive_many(f, r, sectors, err_budget)
    except (ArithmeticError, ValueError, MemoryError) as exc:
        tag = f"area_failed:{type(exc).__name__}"
        return [SweepRow(r, S, nan, nan, om, big, beta, False, tuple(flags + [tag]))
                for S in sectors]
    rows = []
    for S, e in zip(sectors, ests):
        row_flags = list(flags)
        if not e.certified:
            row_flags.append("uncertified")
        rows.append(SweepRow(r, S, e.low, e.high, om, big, beta, e.certified, tuple(row_flags)))
    return rows


def equidistribution_sweep(f: AnalyticFunction, radii, rotations: int = DEFAULT_ROTATIONS,
                           openings=DEFAULT_OPENINGS, err_budget: float = 1e-3,
                           function_id: str = "f", threads: int | None = None) -> SweepTable:
    """Area brackets and circle quantities on the radius x sector grid.

    Rows are radius-major, then opening, then rotation, whatever the order in
    which the radii finish.  Failures become flagged rows.
    """
    radii = [float(r) for r in radii]
    if not radii or rotations < 1 or not list(openings):
        raise PreconditionError("sweep grids must be nonempty")
    sectors = sector_grid(rotations, openings)
    workers = min(threads or thread_count(), len(radii))
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            per_radius = list(pool.map(lambda r: _radius_rows(f, r, sectors, err_budget), radii))
    else:
        per_radius = [_radius_rows(f, r, sectors, err_budget) for r in radii]
    rows = [row for chunk in per_radius for row in chunk]
    meta = {
        "err_budget": err_budget,
        "rotations": rotations,
        "openings": [float(a) for a in openings],
        "truncation_bounds": [fryntov_truncation_bound(f, r) for r in radii],
    }
    return SweepTable(function_id, rows, meta)


@dataclass
class EquidistributionVerdict:
    radius: float
    min_over_sectors: float
    max_deviation: float
    epsilon: float
    flagged: bool
    n_certified: int
    max_deviation_mid: float = float("nan")
    max_undecided: float = float("nan")


def kappa_estimate(table: SweepTable) -> list:
    """Per-radius verdicts computed from certified rows only.

    ``min_over_sectors`` is the smallest ``2 pi areaLow / alpha``;
    ``max_deviation`` bounds ``|A - alpha / 2 pi|`` from the brackets, and
    ``epsilon = 2 pi max_deviation`` is the matching opening slack.
    """
    if not table.rows:
        raise PreconditionError("empty sweep table")
    out = []
    for r in table.radii:
        rows = [row for row in table.rows if row.r == r]
        good = [row for row in rows if row.certified and math.isfinite(row.area_low)]
        flagged = len(good) < len(rows)
        if not good:
            nan = float("nan")
            out.append(EquidistributionVerdict(r, nan, nan, nan, True, 0))
            continue
        mins = [TWO_PI * row.area_low / row.sector.alpha for row in good]
        devs, mids, unds = [], [], []
        for row in good:
            a = row.sector.alpha / TWO_PI
            devs.append(max(abs(row.area_low - a), abs(row.area_high - a)))
            mids.append(abs(0.5 * (row.area_low + row.area_high) - a))
            unds.append(row.area_high - row.area_low)
        dev = max(devs)
        out.append(EquidistributionVerdict(
            r, max(min(mins), 0.0), dev, TWO_PI * dev, flagged, len(good),
            max_deviation_mid=max(mids), max_undecided=max(unds)))
    return out


# --------------------------------------------------------------------------
# empirical constants
# --------------------------------------------------------------------------

@dataclass
class Thm4Result:
    c_empirical: float
    worst_sector: Sector
    beta: float
    beta_star: float
    certified: bool
    per_sector: list = field(default_factory=list)


def vanishes_at_origin(f: AnalyticFunction) -> bool:
    if f.explicit_zeros and np.any(f.zeros == 0):
        return True
    lm = float(eval_log(f, 0.0).log_modulus)
    return lm < math.log(1e-12)


def thm4_check(f: AnalyticFunction, sectors=None, err_budget: float = 1e-3) -> Thm4Result:
    """Smallest ``areaLow(1, S) log(beta*) / alpha`` over the sector grid."""
    if f.domain_radius <= 1:
        raise PreconditionError("f must be analytic on the closed unit disc")
    if not vanishes_at_origin(f):
        raise PreconditionError("f(0) must vanish")
    if sectors is None:
        sectors = sector_grid(DEFAULT_ROTATIONS, DEFAULT_OPENINGS)
    beta, beta_star = doubling_exponent(f, 1.0)
    ests = area_adaptive_many(f, 1.0, sectors, err_budget)
    lb = math.log(beta_star)
    vals = [e.low * lb / S.alpha for S, e in zip(sectors, ests)]
    k = int(np.argmin(vals))
    return Thm4Result(float(vals[k]), sectors[k], beta, beta_star,
                      all(e.certified for e in ests), vals)


@dataclass
class TrendPoint:
    U: float
    r_delta: float
    analysis_radius: float
    max_deviation: float
    max_deviation_mid: float
    max_undecided: float
    certified: bool


def order_zero_trend(f: AnalyticFunction, delta: float, Us, rotations: int = DEFAULT_ROTATIONS,
                     openings=DEFAULT_OPENINGS, err_budget: float = 1e-3) -> list:
    """Deviation from ``alpha / 2 pi`` at the analysis radius for each ``U``."""
    out = []
    sectors = sector_grid(rotations, openings)
    for U in Us:
        r_delta, R = select_radius_order_zero(f, delta, U)
        ests = area_adaptive_many(f, R, sectors, err_budget)
        devs, mids = [], []
        for S, e in zip(sectors, ests):
            a = S.alpha / TWO_PI
            devs.append(max(abs(e.low - a), abs(e.high - a)))
            mids.append(abs(e.mid - a))
        out.append(TrendPoint(float(U), r_delta, R, max(devs), max(mids),
                              max(e.undecided_mass for e in ests),
                              all(e.certified for e in ests)))
    return out


def trend_non_increasing(points: list) -> bool:
    """Midpoint deviations may only grow by the estimators' half-widths."""
    for a, b in zip(points[:-1], points[1:]):
        if b.max_deviation_mid > a.max_deviation_mid + 0.5 * (a.max_undecided + b.max_undecided):
            return False
    return True


def liminf_limsup_witness(table: SweepTable):
    """A sector with one radius certified below and one certified above ``alpha/2pi``.

    Returns ``(sector, r_below, r_above)`` or ``None``.
    """
    by_sector = {}
    for row in table.rows:
        if row.certified:
            by_sector.setdefault((row.sector.theta1, row.sector.alpha), []).append(row)
    for rows in by_sector.values():
        a = rows[0].sector.alpha / TWO_PI
        below = [row.r for row in rows if row.area_high < a]
        above = [row.r for row in rows if row.area_low > a]
        if below and above:
            return rows[0].sector, below[0], above[0]
    return None


# --------------------------------------------------------------------------
# ensembles
# --------------------------------------------------------------------------

@dataclass
class EnsembleSummary:
    values: list
    minimum: float
    argmin: int
    certified: bool


def thm4_ensemble(functions, sectors=None, err_budget: float = 1e-3) -> EnsembleSummary:
    """``thm4_check`` over a list of functions; the minimum is the desk-scale constant."""
    results = [thm4_check(f, sectors, err_budget) for f in functions]
    vals = [r.c_empirical for r in results]
    k = int(np.argmin(vals))
    return EnsembleSummary(vals, float(vals[k]), k, all(r.certified for r in results))


def lemma_ensemble(functions, t: float, S: Sector, radial_samples: int = 16,
                   err_budget: float = 1e-3):
    """Main-Lemma reports; the summary covers cases where both hypotheses hold.

    Returns ``(reports, summary)``; ``summary`` is None when no case qualifies.
    """
    reports = [main_lemma_check(f, t, S, radial_samples, err_budget) for f in functions]
    kept = [(i, r.ratio) for i, r in enumerate(reports) if r.hypotheses_hold]
    if not kept:
        return reports, None
    idx, vals = zip(*kept)
    k = int(np.argmin(vals))
    return reports, EnsembleSummary(list(vals), float(vals[k]), int(idx[k]), True)
