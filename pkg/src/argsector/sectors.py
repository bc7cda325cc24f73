"""Sectors in the value plane and the relative area of their preimages.

``A(r, S, f)`` is the fraction of the disc ``|z| < r`` on which ``f`` takes
values in the open sector ``S``.  Two estimators are provided: a uniform
pixel-counting oracle and a quadtree that certifies each resolved cell with
a rigorous bound on the variation of ``arg f`` over the cell.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from numpy.polynomial import polynomial as npoly

from .functions import (
    LOG_OVERFLOW,
    TWO_PI,
    AnalyticFunction,
    _add_one,
    _product_log,
    eval_log,
    logderiv_array,
    reduce_angle,
)

MAX_DEPTH = 24


@dataclass(frozen=True)
class Sector:
    """Open sector ``{w : theta1 < arg w < theta1 + alpha}``."""
    theta1: float
    alpha: float

    def __post_init__(self):
        if not 0 < self.alpha <= TWO_PI:
            raise ValueError(f"opening must lie in (0, 2pi], got {self.alpha!r}")
        object.__setattr__(self, "theta1", float(np.mod(float(self.theta1), TWO_PI)))
        object.__setattr__(self, "alpha", float(self.alpha))

    @property
    def full(self) -> bool:
        return self.alpha >= TWO_PI

    @property
    def boundaries(self) -> tuple:
        if self.full:
            return ()
        return (self.theta1, float(np.mod(self.theta1 + self.alpha, TWO_PI)))

    def complement(self) -> "Sector":
        return Sector(self.theta1 + self.alpha, TWO_PI - self.alpha)

    def rotated(self, phi: float) -> "Sector":
        return Sector(self.theta1 + phi, self.alpha)

    def contains(self, arg_value):
        return sector_contains(self, arg_value)


def sector_contains(S: Sector, arg_value):
    """Membership of ``arg_value`` (radians) in the open sector, periodically."""
    a = np.asarray(arg_value, dtype=float)
    if S.full:
        out = np.isfinite(a)
    else:
        with np.errstate(invalid="ignore"):
            d = np.mod(a - S.theta1, TWO_PI)
            out = (d > 0) & (d < S.alpha) & np.isfinite(a)
    return bool(out) if out.ndim == 0 else out


def sector_grid(rotations: int, openings) -> list:
    """``rotations`` equally spaced lower edges for each opening, deterministic order."""
    return [Sector(TWO_PI * j / rotations, float(alpha))
            for alpha in openings for j in range(rotations)]


# --------------------------------------------------------------------------
# pixel oracle
# --------------------------------------------------------------------------

def _grid_rows(r: float, gridN: int, rows_per_chunk: int):
    step = 2.0 * r / gridN
    x = -r + (np.arange(gridN) + 0.5) * step
    for i0 in range(0, gridN, rows_per_chunk):
        y = x[i0: i0 + rows_per_chunk]
        X, Y = np.meshgrid(x, y)
        inside = X * X + Y * Y < r * r
        yield X[inside] + 1j * Y[inside], step


def area_oracle_counts(f: AnalyticFunction, r: float, S: Sector, gridN: int,
                       rows_per_chunk: int | None = None):
    """``(hits, points)`` on the ``gridN x gridN`` cell-centre grid clipped to the disc."""
    if gridN < 64:
        raise ValueError("gridN must be at least 64")
    rows_per_chunk = rows_per_chunk or max(1, 2_000_000 // gridN)
    hits = points = 0
    for z, _ in _grid_rows(r, gridN, rows_per_chunk):
        a = eval_log(f, z).arg
        hits += int(np.count_nonzero(sector_contains(S, a)))
        points += z.size
    return hits, points


def area_oracle(f: AnalyticFunction, r: float, S: Sector, gridN: int = 1024) -> float:
    """Brute-force ``A(r, S, f)`` by counting grid points; zeros of f count as outside."""
    hits, points = area_oracle_counts(f, r, S, gridN)
    return hits / points


# --------------------------------------------------------------------------
# exact disc clipping
# --------------------------------------------------------------------------

def _quadrant_area(x, y, r):
    """Signed area of the disc inside ``[0, x] x [0, y]`` (odd in each argument)."""
    sx, sy = np.sign(x), np.sign(y)
    x = np.minimum(np.abs(x), r)
    y = np.minimum(np.abs(y), r)
    inner = x * x + y * y <= r * r
    xc = np.sqrt(np.maximum(r * r - y * y, 0.0))
    xc = np.minimum(xc, x)

    def S(t):
        return 0.5 * (t * np.sqrt(np.maximum(r * r - t * t, 0.0)) + r * r * np.arcsin(np.clip(t / r, -1.0, 1.0)))

    outer = y * xc + S(x) - S(xc)
    return sx * sy * np.where(inner, x * y, outer)


def rect_disc_area(x0, x1, y0, y1, r):
    """Exact area of ``[x0, x1] x [y0, y1]`` intersected with ``|z| <= r``."""
    return (_quadrant_area(x1, y1, r) - _quadrant_area(x0, y1, r)
            - _quadrant_area(x1, y0, r) + _quadrant_area(x0, y0, r))


# --------------------------------------------------------------------------
# quadtree estimator
# --------------------------------------------------------------------------

@dataclass
class AreaEstimate:
    in_mass: float
    undecided_mass: float
    radius: float
    cells_visited: int
    certified: bool = True
    sector: Sector | None = None

    @property
    def low(self) -> float:
        return self.in_mass

    @property
    def high(self) -> float:
        return self.in_mass + self.undecided_mass

    @property
    def mid(self) -> float:
        return self.in_mass + 0.5 * self.undecided_mass


def _taylor_abs_bound(coeffs: np.ndarray, c: np.ndarray, rad: float) -> np.ndarray:
    """``max_{|u| <= rad} |p(c + u)|`` bound from the Taylor expansion at ``c``."""
    out = np.zeros(c.shape)
    p = np.asarray(coeffs, dtype=complex)
    fact = 1.0
    k = 0
    while p.size and np.any(p != 0):
        out += np.abs(npoly.polyval(c, p)) / fact * rad ** k
        p = npoly.polyder(p) if p.size > 1 else np.zeros(0, complex)
        k += 1
        fact *= k
    return out


@dataclass
class _CellData:
    """Per-cell quantities shared by every sector at one quadtree level."""
    h: float
    clipped: np.ndarray   # cell area inside the disc
    outside: np.ndarray   # cell area outside the disc
    arg: np.ndarray       # arg f at the centre
    lip: np.ndarray       # |arg f - arg f(c)| <= lip on the cell
    bad: np.ndarray       # near a zero, or no usable bound
    lin_ok: np.ndarray    # linear model with remainder usable
    P: np.ndarray         # half-ranges of the linear part along the two axes
    Q: np.ndarray
    eps: np.ndarray       # remainder bound of the linear model

    def take(self, idx) -> "_CellData":
        return _CellData(self.h, *(getattr(self, k)[idx] for k in
                                   ("clipped", "outside", "arg", "lip", "bad", "lin_ok", "P", "Q", "eps")))


def _prepare_cells(f: AnalyticFunction, c: np.ndarray, h: float, clipped: np.ndarray) -> _CellData:
    """Bound ``arg f`` on square cells of half-side ``h`` centred at ``c``.

    With ``w = f'/f(c)`` and ``M2 >= sup |(f'/f)'|`` on the cell,
    ``arg f(c + u) = arg f(c) + Im(u w) + R`` with ``|R| <= |u|^2 M2 / 2``.
    Cells within two diameters of a zero are never certified.
    """
    rho = math.sqrt(2.0) * h          # half the cell diameter
    diam = 2.0 * rho
    with np.errstate(divide="ignore", over="ignore", invalid="ignore"):
        if f.zeros.size:
            dist = np.abs(c[:, None] - f.zeros[None, :])
            near = np.any(dist <= 2.0 * diam, axis=1)
            gap = np.maximum(dist - rho, 1e-150)
            m = f.multiplicities[None, :]
            b1 = np.sum(m / gap, axis=1)
            b2 = np.sum(m / (gap * gap), axis=1)
        else:
            near = np.zeros(c.shape, bool)
            b1 = np.zeros(c.shape)
            b2 = np.zeros(c.shape)
        dg = f._dg
        if dg.size > 1 or dg[0] != 0:
            b1 = b1 + _taylor_abs_bound(dg, c, rho)
            if dg.size > 1:
                b2 = b2 + _taylor_abs_bound(npoly.polyder(dg), c, rho)

        if f.offset:
            # f = 1 + p: f'/f = q p'/p with q = p/(1+p); bound |q| on the cell
            L, a_p = _product_log(f, c)
            Lf, arg = _add_one(L, a_p)
            lam = rho * b1            # |log p(z) - log p(c)| <= lam on the cell
            ratio = np.exp(L - Lf)
            denom = 1.0 - ratio * np.expm1(lam)
            qmax = np.where(denom > 0, ratio * np.exp(lam) / np.where(denom > 0, denom, 1.0), np.inf)
            # |p| >> 1: q = 1 / (1 + 1/p) and 1 - q = 1 / (1 + p) are both controlled by |1/p|
            u = np.exp(np.minimum(lam - L, 0.0))
            big_p = lam < L
            qmax = np.where(big_p, np.minimum(qmax, 1.0 / (1.0 - u)), qmax)
            # |p| << 1: |q| <= |p| / (1 - |p|)
            v = np.exp(np.minimum(L + lam, 0.0))
            qmax = np.where(L + lam < 0, np.minimum(qmax, v / (1.0 - v)), qmax)
            omq = np.where(big_p, np.minimum(1.0 + qmax, u / (1.0 - u)), 1.0 + qmax)
            m1 = b1 * qmax
            # (f'/f)' = q (p'/p)' + q (1 - q) (p'/p)^2
            m2 = qmax * (b2 + omq * b1 * b1)
        else:
            arg = eval_log(f, c).arg
            m1, m2 = b1, b2
        w = logderiv_array(f, c)
        lip = rho * m1
        eps = 0.5 * rho * rho * m2
        A = h * np.abs(w.imag)
        B = h * np.abs(w.real)
        P = np.maximum(A, B)
        Q = np.minimum(A, B)
    thin = Q < 1e-6 * P
    eps = np.where(thin, eps + Q, eps)
    Q = np.where(thin, 0.0, Q)
    bad = near | ~np.isfinite(arg) | ~np.isfinite(lip) | ~np.isfinite(w)
    lin_ok = ~bad & np.isfinite(eps) & (P + Q + eps < math.pi)
    return _CellData(h, clipped, np.maximum(4 * h * h - clipped, 0.0), arg,
                     np.where(bad, np.inf, lip), bad, lin_ok,
                     np.where(lin_ok, P, 0.0), np.where(lin_ok, Q, 0.0), np.where(lin_ok, eps, 0.0))


def _square_below(cval: np.ndarray, P: np.ndarray, Q: np.ndarray, h: float) -> np.ndarray:
    """Area of the cell where the linear part ``x + y <= c``, ``|x| <= P``, ``|y| <= Q``."""
    cval = np.asarray(cval, dtype=float)
    out = np.empty(cval.shape)
    full = cval >= P + Q
    none = cval <= -(P + Q)
    mid = ~(full | none)
    out[full] = 1.0
    out[none] = 0.0
    c, p, q = cval[mid], P[mid], Q[mid]
    two_d = q > 0

    def ramp(x):
        x = np.maximum(x, 0.0)
        return x * x

    cdf = np.empty(c.shape)
    c2, p2, q2 = c[two_d], p[two_d], q[two_d]
    cdf[two_d] = 0.5 * (ramp(c2 + p2 + q2) - ramp(c2 - p2 + q2) - ramp(c2 + p2 - q2)
                        + ramp(c2 - p2 - q2)) / (4.0 * p2 * q2)
    c1, p1 = c[~two_d], p[~two_d]
    cdf[~two_d] = (c1 + p1) / (2.0 * p1)
    out[mid] = np.clip(cdf, 0.0, 1.0)
    return 4.0 * h * h * out


def _interval_area(lo, width, d: _CellData) -> np.ndarray:
    """Cell area where the linear model's argument lies in ``(lo, lo + width)`` mod 2 pi.

    ``lo`` is relative to the centre argument and lies in ``(-pi - eps, pi + eps]``.
    """
    out = np.zeros(lo.shape)
    for k in (0.0, -TWO_PI):
        out += _square_below(lo + width + k, d.P, d.Q, d.h) - _square_below(lo + k, d.P, d.Q, d.h)
    return np.maximum(out, 0.0)


def _sector_bracket(S: Sector, d: _CellData):
    """Certified lower/upper cell areas of ``f^{-1} S`` for every cell."""
    if S.full:
        return d.clipped.copy(), d.clipped.copy()
    b1, b2 = S.boundaries
    with np.errstate(invalid="ignore"):
        decided = (~d.bad & (d.lip < math.pi)
                   & (np.abs(reduce_angle(d.arg - b1)) > d.lip)
                   & (np.abs(reduce_angle(d.arg - b2)) > d.lip))
    inside = sector_contains(S, d.arg)
    low = np.where(decided & inside, d.clipped, 0.0)
    high = np.where(decided & ~inside, 0.0, d.clipped)

    ok = d.lin_ok & ~decided
    if np.any(ok):
        e = d.take(ok)
        d_lo = reduce_angle(S.theta1 - e.arg)
        w_in = S.alpha - 2.0 * e.eps
        lin_low = np.where(w_in > 0, _interval_area(d_lo + e.eps, np.maximum(w_in, 0.0), e), 0.0)
        w_out = S.alpha + 2.0 * e.eps
        lin_high = np.where(w_out < TWO_PI,
                            _interval_area(d_lo - e.eps, np.minimum(w_out, TWO_PI), e), 4 * e.h * e.h)
        low[ok] = np.maximum(low[ok], np.maximum(lin_low - e.outside, 0.0))
        high[ok] = np.minimum(high[ok], np.minimum(lin_high, e.clipped))
    high = np.maximum(high, low)
    return low, high


def area_adaptive_many(f: AnalyticFunction, r: float, sectors, err_budget: float = 1e-3,
                       max_depth: int = MAX_DEPTH, max_cells: int = 6_000_000) -> list:
    """Certified ``A(r, S, f)`` for several sectors from one shared quadtree.

    Each cell contributes a certified bracket per sector.  At every level
    the cells with the largest undecided area are split until the remaining
    undecided mass of each sector is within half its budget; the rest are
    committed.  Masses are relative to the disc area ``pi r^2``.
    """
    if not 0 < err_budget < 0.5:
        raise ValueError("err_budget must lie in (0, 0.5)")
    if not 0 < r < f.domain_radius:
        raise ValueError("radius must be positive and inside the domain")
    sectors = list(sectors)
    ns = len(sectors)
    disc = math.pi * r * r
    budget = err_budget * disc
    committed_in = np.zeros(ns)
    committed_und = np.zeros(ns)
    cells = np.zeros(1, complex)
    h = float(r)
    visited = 0
    depth = 0
    children = np.array([-1 - 1j, 1 - 1j, -1 + 1j, 1 + 1j])
    while cells.size:
        visited += cells.size
        area = rect_disc_area(cells.real - h, cells.real + h, cells.imag - h, cells.imag + h, r)
        keep = area > 0
        cells, area = cells[keep], area[keep]
        if cells.size == 0:
            break
        data = _prepare_cells(f, cells, h, area)

        low_tot = np.empty(ns)
        und_tot = np.empty(ns)
        sparse = []
        for k, S in enumerate(sectors):
            low, high = _sector_bracket(S, data)
            u = high - low
            low_tot[k] = low.sum()
            und_tot[k] = u.sum()
            nz = np.flatnonzero(u > 0)
            sparse.append((nz, u[nz]))

        split = np.zeros(cells.size, bool)
        if depth < max_depth:
            for k in range(ns):
                if committed_und[k] + und_tot[k] <= budget:
                    continue
                nz, uv = sparse[k]
                target = 0.5 * budget - committed_und[k]
                if target <= 0:
                    split[nz] = True
                    continue
                order = np.argsort(-uv, kind="stable")
                remaining = und_tot[k] - np.cumsum(uv[order])
                cut = int(np.searchsorted(-remaining, -target)) + 1
                split[nz[order[:cut]]] = True
            if visited + 4 * np.count_nonzero(split) > max_cells:
                split[:] = False

        idx = np.flatnonzero(split)
        sub = data.take(idx) if idx.size else None
        for k, S in enumerate(sectors):
            if sub is None:
                committed_in[k] += low_tot[k]
                committed_und[k] += und_tot[k]
            else:
                low, high = _sector_bracket(S, sub)
                committed_in[k] += low_tot[k] - low.sum()
                committed_und[k] += max(und_tot[k] - (high - low).sum(), 0.0)
        h *= 0.5
        cells = (cells[idx][:, None] + h * children[None, :]).ravel()
        depth += 1

    out = []
    for k, S in enumerate(sectors):
        und = committed_und[k] / disc
        out.append(AreaEstimate(
            in_mass=float(committed_in[k] / disc),
            undecided_mass=float(und),
            radius=float(r),
            cells_visited=visited,
            certified=bool(und <= err_budget),
            sector=S,
        ))
    return out


def area_adaptive(f: AnalyticFunction, r: float, S: Sector, err_budget: float = 1e-3,
                  max_depth: int = MAX_DEPTH) -> AreaEstimate:
    """Certified bracket ``[in_mass, in_mass + undecided_mass]`` for ``A(r, S, f)``."""
    return area_adaptive_many(f, r, [S], err_budget, max_depth)[0]


# --------------------------------------------------------------------------
# weighted probe
# --------------------------------------------------------------------------

def weighted_sector_mass(f: AnalyticFunction, S: Sector, gridN: int = 1024):
    """Grid estimates of the integrals of ``|f|`` over ``f^{-1} S`` and over the unit disc.

    Returns ``(mass_in, mass_total)``; only meaningful for functions of
    moderate size on the unit disc.
    """
    if f.domain_radius < 1:
        raise ValueError("f must be analytic on the unit disc")
    mass_in = mass_total = 0.0
    for z, step in _grid_rows(1.0, gridN, max(1, 2_000_000 // gridN)):
        lv = eval_log(f, z)
        if np.any(lv.log_modulus >= LOG_OVERFLOW):
            raise OverflowError("|f| too large for the weighted probe")
        w = np.exp(lv.log_modulus)
        mass_total += float(w.sum()) * step * step
        mass_in += float(w[sector_contains(S, lv.arg)].sum()) * step * step
    return mass_in, mass_total
