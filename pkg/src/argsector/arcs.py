"""Traversing arcs on circles and the empirical Main-Lemma check.

For a sector ``S = (theta1, theta1 + alpha)`` a T-arc is an open arc of
``|z| = r`` that a continuous branch of ``arg f`` maps onto a full window
``(theta1 + 2 pi m, theta1 + 2 pi (m + 1))``; inside it, the S-arc is the
part mapped onto ``(theta1 + 2 pi m, theta1 + alpha + 2 pi m)``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import brentq

from .circle import (
    GUARD_REL,
    CircleTrace,
    UnsupportedRepresentation,
    omega_big,
    omega_small,
    trace_circle,
)
from .functions import TWO_PI, AnalyticFunction, eval_log, reduce_angle
from .sectors import Sector, area_adaptive


@dataclass(frozen=True)
class TraversingArc:
    kind: str                 # "T" or "S"
    theta_start: float
    theta_end: float          # may exceed 2 pi for arcs through theta = 0
    branch: int               # m in the window (theta1 + 2 pi m, ...)
    direction: int            # +1 if arg f increases along the arc
    parent: int | None = None  # index of the containing T-arc for S-arcs

    @property
    def angle(self) -> float:
        return self.theta_end - self.theta_start


@dataclass
class ArcDecomposition:
    radius: float
    sector: Sector
    t_arcs: list
    s_arcs: list
    step_bound: float

    @property
    def M(self) -> int:
        return len(self.t_arcs)

    def length(self, arc: TraversingArc) -> float:
        return self.radius * arc.angle


@dataclass(frozen=True)
class _Crossing:
    theta: float
    level: float
    family: int   # 0: theta1 + 2 pi k, 1: theta1 + alpha + 2 pi k
    direction: int


def _crossings(theta: np.ndarray, phi: np.ndarray, base: float, family: int,
               winding: int, polish=None) -> list:
    """Crossings of ``phi`` through ``base + 2 pi k`` on the piecewise-linear interpolant.

    A sample lying exactly on a level counts as above it, so every crossing
    belongs to exactly one segment. The closing sample is pinned to the
    first one plus ``2 pi winding`` so no crossing is lost to roundoff.
    """
    fl = np.floor((phi - base) / TWO_PI)
    fl[-1] = fl[0] + winding
    out = []
    seg = np.flatnonzero(fl[1:] != fl[:-1])
    for i in seg:
        y0, y1 = phi[i], phi[i + 1]
        up = y1 > y0
        lo, hi = (fl[i], fl[i + 1]) if up else (fl[i + 1], fl[i])
        ks = np.arange(lo + 1, hi + 1)
        if not up:
            ks = ks[::-1]
        for k in ks:
            level = base + TWO_PI * k
            frac = (level - y0) / (y1 - y0)
            th = theta[i] + frac * (theta[i + 1] - theta[i])
            if polish is not None:
                th = polish(i, level, th)
            out.append(_Crossing(float(th), float(level), family, 1 if up else -1))
    return out


def _polisher(f: AnalyticFunction, trace: CircleTrace, phi: np.ndarray):
    """Root-find ``arg f = level`` inside one trace segment.

    Within a segment the principal increment stays below the trace step
    tolerance, so the branch is recovered from the left sample.
    """
    th, rep, r = trace.thetas, trace.arg_rep, trace.radius

    def local_phi(i, t):
        a = float(eval_log(f, r * np.exp(1j * t)).arg)
        return phi[i] + float(reduce_angle(a - rep[i]))

    def polish(i, level, guess):
        a, b = float(th[i]), float(th[i + 1])
        fa, fb = local_phi(i, a) - level, local_phi(i, b) - level
        if fa == 0.0:
            return a
        if fb == 0.0 or fa * fb > 0:
            return guess
        return brentq(lambda t: local_phi(i, t) - level, a, b, xtol=1e-14, rtol=1e-15)

    return polish


def decompose_arcs(trace: CircleTrace, S: Sector, f: AnalyticFunction | None = None) -> ArcDecomposition:
    """All traversing T-arcs and their S-arcs on the traced circle.

    T-arcs join consecutive crossings of the lattice ``theta1 + 2 pi Z``
    whose levels differ by ``2 pi``; such arcs are pairwise disjoint, so the
    whole family is kept.  Crossings come from the piecewise-linear
    interpolant of the trace; passing ``f`` polishes them on ``arg f`` itself.
    """
    w = trace.winding
    total = TWO_PI * w
    th = trace.thetas
    phi = trace.arg_values.copy()
    phi[-1] = phi[0] + total
    polish = _polisher(f, trace, phi) if f is not None else None
    tc = _crossings(th, phi, S.theta1, 0, w, polish)
    sc = _crossings(th, phi, S.theta1 + S.alpha, 1, w, polish) if not S.full else []
    dec = ArcDecomposition(trace.radius, S, [], [], trace.step_bound)
    if not tc:
        return dec
    first = tc[0]
    tc = tc + [_Crossing(first.theta + TWO_PI, first.level + total, 0, first.direction)]
    sc = sc + [_Crossing(c.theta + TWO_PI, c.level + total, 1, c.direction) for c in sc]
    s_thetas = np.array([c.theta for c in sc])

    for a, b in zip(tc[:-1], tc[1:]):
        dl = b.level - a.level
        if abs(abs(dl) - TWO_PI) > 1e-6 * (1.0 + abs(a.level)):
            continue
        low_level = min(a.level, b.level)
        m = int(round((low_level - S.theta1) / TWO_PI))
        direction = 1 if dl > 0 else -1
        t0, t1 = a.theta, b.theta
        if t0 >= TWO_PI:
            t0, t1 = t0 - TWO_PI, t1 - TWO_PI
        dec.t_arcs.append(TraversingArc("T", t0, t1, m, direction))
        parent = len(dec.t_arcs) - 1
        if S.full:
            dec.s_arcs.append(TraversingArc("S", t0, t1, m, direction, parent))
            continue
        shift = t0 - a.theta
        inside = np.flatnonzero((s_thetas > a.theta) & (s_thetas < b.theta))
        if inside.size == 0:
            continue
        if direction > 0:
            s0, s1 = a.theta, float(s_thetas[inside[0]])
        else:
            s0, s1 = float(s_thetas[inside[-1]]), b.theta
        dec.s_arcs.append(TraversingArc("S", s0 + shift, s1 + shift, m, direction, parent))
    return dec


@dataclass
class ArcClassification:
    short: list               # per S-arc
    very_short: list          # per T-arc
    exceptional: bool
    short_threshold: float
    very_short_threshold: float

    @property
    def n_short(self) -> int:
        return int(sum(self.short))

    @property
    def n_very_short(self) -> int:
        return int(sum(self.very_short))


def classify_arcs(dec: ArcDecomposition, t: float, M: int, eta: float = 0.01,
                  delta: float = 0.01, zero_moduli=()) -> ArcClassification:
    """Short S-arcs (``|I| <= alpha eta (1-t)/M``), very short T-arcs
    (``|J| <= delta (1-t)/M``) and whether the radius is exceptional."""
    if M < 1:
        raise ValueError("classification needs M >= 1")
    if not 0 < t < 1:
        raise ValueError("t must lie in (0, 1)")
    if eta <= 0 or delta <= 0:
        raise ValueError("eta and delta must be positive")
    short_thr = dec.sector.alpha * eta * (1.0 - t) / M
    vs_thr = delta * (1.0 - t) / M
    short = [dec.length(a) <= short_thr for a in dec.s_arcs]
    very_short = [dec.length(a) <= vs_thr for a in dec.t_arcs]
    mods = np.asarray(zero_moduli, dtype=float)
    exceptional = bool(mods.size and np.min(np.abs(mods - dec.radius)) < vs_thr)
    return ArcClassification(short, very_short, exceptional, short_thr, vs_thr)


# --------------------------------------------------------------------------
# Main Lemma
# --------------------------------------------------------------------------

@dataclass
class LemmaReport:
    t: float
    sector: Sector
    hypothesis_omega_inf: bool
    hypothesis_omega_ratio: bool
    omega_inf: float
    omega_big_t: float
    omega_big_1: float
    M: int
    area_low: float
    area_high: float
    measured_area: float
    ratio: float | None
    ratio_low: float | None
    raw_ratio: float          # measured area over alpha (1-t)^2, hypotheses or not
    radii: list = field(default_factory=list)

    @property
    def hypotheses_hold(self) -> bool:
        return self.hypothesis_omega_inf and self.hypothesis_omega_ratio


def _off_guard(f: AnalyticFunction, r: float, lo: float, hi: float) -> float:
    if not f.explicit_zeros or f.zeros.size == 0:
        return r
    mods = f.zero_moduli
    for _ in range(8):
        if np.min(np.abs(mods - r)) >= GUARD_REL * r:
            return r
        r = r - 1e-7 if r + 1e-7 > hi else r + 1e-7
        r = min(max(r, lo), hi)
    return r


def main_lemma_check(f: AnalyticFunction, t: float, S: Sector, radial_samples: int = 16,
                     err_budget: float = 1e-3) -> LemmaReport:
    """Check the hypotheses and measure ``Area(f^{-1} S on t <= |z| <= 1)``."""
    if not 0 < t < 1:
        raise ValueError("t must lie in (0, 1)")
    if f.domain_radius <= 1:
        raise ValueError("f must be analytic on the closed unit disc")
    if not f.explicit_zeros:
        raise UnsupportedRepresentation("the Omega hypothesis needs an explicit zero list")
    radii = [_off_guard(f, float(r), t, 1.0) for r in np.linspace(t, 1.0, radial_samples)]
    omega_inf = float(min(omega_big(f, r).omega for r in radii))
    big_t = omega_big(f, radii[0]).omega_big
    big_1 = omega_big(f, radii[-1]).omega_big
    hyp1 = omega_inf >= TWO_PI - 1e-9
    hyp2 = big_t >= 0.5 * big_1 - 1e-6 * (1.0 + big_1)

    e1 = area_adaptive(f, 1.0, S, err_budget)
    et = area_adaptive(f, t, S, err_budget)
    low = math.pi * e1.in_mass - math.pi * t * t * et.high
    high = math.pi * e1.high - math.pi * t * t * et.in_mass
    mid = 0.5 * (low + high)
    scale = S.alpha * (1.0 - t) ** 2
    ok = hyp1 and hyp2
    return LemmaReport(
        t=t, sector=S,
        hypothesis_omega_inf=hyp1, hypothesis_omega_ratio=hyp2,
        omega_inf=omega_inf, omega_big_t=big_t, omega_big_1=big_1,
        M=int(math.floor(omega_inf / TWO_PI + 1e-12)),
        area_low=low, area_high=high, measured_area=mid,
        ratio=mid / scale if ok else None,
        ratio_low=max(low, 0.0) / scale if ok else None,
        raw_ratio=mid / scale,
        radii=radii,
    )


def arc_counts(f: AnalyticFunction, radii, S: Sector, t: float, M: int, eta: float = 0.01,
               delta: float = 0.01, step_tol: float = math.pi / 8, n_initial: int = 128):
    """Per-radius ``(M(r), M_s(r), m(r), exceptional)`` diagnostics."""
    mods = f.zero_moduli if f.explicit_zeros else ()
    rows = []
    for r in radii:
        dec = decompose_arcs(trace_circle(f, r, step_tol, n_initial), S, f)
        cls = classify_arcs(dec, t, M, eta, delta, mods)
        rows.append((float(r), dec.M, cls.n_short, cls.n_very_short, cls.exceptional))
    return rows
