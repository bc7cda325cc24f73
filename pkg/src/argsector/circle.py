"""Continuous argument tracking on circles and the oscillation characteristics.

A :class:`CircleTrace` is an adaptively refined sampling of ``arg f`` and
``log|f|`` along ``r e^{i theta}``, ``0 <= theta <= 2 pi``, from which the
maximal arc increment ``omega(r, f)``, the monotone surrogate
``Omega(r, f) = 2 pi n(r, f) + osc Im g_r`` and the doubling exponent are
computed.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from numpy.polynomial import polynomial as npoly
from scipy.optimize import minimize_scalar

from .functions import (
    TWO_PI,
    AnalyticFunction,
    eval_log,
    logderiv_array,
    reduce_angle,
    zeros_within,
)

DEFAULT_STEP_TOL = math.pi / 8
MAX_STEP_TOL = math.pi / 4
MAX_DEPTH = 30
GUARD_REL = 1e-9
NUDGE_REL = 1e-6


class TraceError(RuntimeError):
    """Adaptive refinement failed, typically because f vanishes on the circle."""

    def __init__(self, message, interval=None):
        super().__init__(message)
        self.interval = interval


class UnsupportedRepresentation(ValueError):
    """The characteristic needs an explicit zero list that f does not have."""


@dataclass(frozen=True, eq=False)
class CircleTrace:
    radius: float
    thetas: np.ndarray          # strictly increasing, thetas[0] = 0, thetas[-1] = 2 pi
    arg_values: np.ndarray      # continuous branch of arg f
    log_mod_values: np.ndarray
    total_increment: float
    refinement_depth: int
    step_bound: float
    requested_radius: float
    arg_rep: np.ndarray         # principal values, kept for re-unwrapping

    @property
    def winding(self) -> int:
        return int(round(self.total_increment / TWO_PI))

    @property
    def nudged(self) -> bool:
        return self.radius != self.requested_radius

    @property
    def n_samples(self) -> int:
        return self.thetas.size


def guard_radius(f: AnalyticFunction, r: float) -> float:
    """Move ``r`` off the set of zero moduli.

    Radii within ``1e-9 r`` of a zero modulus are pushed to the outer side of
    that modulus, which realises the one-sided limit ``Omega(r0 + 0)``.
    """
    if not f.explicit_zeros or f.zeros.size == 0:
        return float(r)
    mods = f.zero_moduli
    k = int(np.argmin(np.abs(mods - r)))
    rho = float(mods[k])
    if abs(r - rho) >= GUARD_REL * r:
        return float(r)
    upper = float(mods[k + 1]) if k + 1 < mods.size else math.inf
    step = min(0.5 * (upper - rho), NUDGE_REL * max(rho, 1e-300))
    return rho + step


def _circle_points(r: float, thetas: np.ndarray) -> np.ndarray:
    z = r * np.exp(1j * thetas)
    # the closing sample is the same point as the first one
    if thetas.size and thetas[-1] == TWO_PI:
        z[-1] = z[0]
    return z


def _unwrap(arg_rep: np.ndarray) -> np.ndarray:
    d = reduce_angle(np.diff(arg_rep))
    return np.concatenate([[arg_rep[0]], arg_rep[0] + np.cumsum(d)])


def _assemble(r, requested, thetas, lm, arg, depth) -> CircleTrace:
    phi = _unwrap(arg)
    steps = np.abs(np.diff(phi))
    return CircleTrace(
        radius=float(r),
        thetas=thetas,
        arg_values=phi,
        log_mod_values=lm,
        total_increment=float(phi[-1] - phi[0]),
        refinement_depth=int(depth),
        step_bound=float(steps.max()) if steps.size else 0.0,
        requested_radius=float(requested),
        arg_rep=arg,
    )


def trace_circle(f: AnalyticFunction, r: float, step_tol: float = DEFAULT_STEP_TOL,
                 n_initial: int = 128, max_depth: int = MAX_DEPTH) -> CircleTrace:
    """Adaptively sample a continuous branch of ``arg f`` on ``|z| = r``.

    An interval is bisected while the principal-value increment of ``arg f``
    reaches ``step_tol``, the change of ``log|f|`` reaches 1, or the
    derivative estimate ``r dtheta |f'/f|`` at either end exceeds
    ``2 step_tol``.
    """
    if not r > 0:
        raise ValueError("radius must be positive")
    if r >= f.domain_radius:
        raise ValueError("radius outside the domain of f")
    step_tol = min(float(step_tol), MAX_STEP_TOL)
    requested = float(r)
    r = guard_radius(f, r)

    thetas = np.linspace(0.0, TWO_PI, n_initial + 1)
    z = _circle_points(r, thetas)
    lv = eval_log(f, z)
    lm, arg = lv.log_modulus, lv.arg
    dl = np.abs(logderiv_array(f, z))
    depth = np.zeros(n_initial, dtype=np.int64)

    while True:
        if not np.all(np.isfinite(lm)):
            bad = int(np.flatnonzero(~np.isfinite(lm))[0])
            raise TraceError(f"f vanishes on the circle r={r} near theta={thetas[bad]}",
                             (thetas[max(bad - 1, 0)], thetas[min(bad + 1, thetas.size - 1)]))
        h = np.diff(thetas)
        darg = np.abs(reduce_angle(np.diff(arg)))
        dlm = np.abs(np.diff(lm))
        with np.errstate(invalid="ignore"):
            pred = r * h * np.maximum(dl[:-1], dl[1:])
        bad = (darg >= step_tol) | (dlm >= 1.0) | ~(pred <= 2.0 * step_tol)
        if not bad.any():
            break
        if np.any(depth[bad] >= max_depth):
            i = int(np.flatnonzero(bad & (depth >= max_depth))[0])
            raise TraceError(
                f"refinement depth {max_depth} exceeded on r={r}, theta in "
                f"[{thetas[i]:.12g}, {thetas[i + 1]:.12g}] (zero on or near the circle?)",
                (float(thetas[i]), float(thetas[i + 1])))
        idx = np.flatnonzero(bad)
        mids = 0.5 * (thetas[idx] + thetas[idx + 1])
        zm = r * np.exp(1j * mids)
        lvm = eval_log(f, zm)
        dlm_new = np.abs(logderiv_array(f, zm))
        thetas = np.insert(thetas, idx + 1, mids)
        lm = np.insert(lm, idx + 1, lvm.log_modulus)
        arg = np.insert(arg, idx + 1, lvm.arg)
        dl = np.insert(dl, idx + 1, dlm_new)
        depth = np.repeat(depth + bad, 1 + bad.astype(np.int64))

    return _assemble(r, requested, thetas, lm, arg, depth.max(initial=0))


def add_samples(f: AnalyticFunction, trace: CircleTrace, new_thetas) -> CircleTrace:
    """Return ``trace`` with extra sample angles merged in."""
    new = np.mod(np.asarray(new_thetas, dtype=float), TWO_PI)
    new = new[~np.isin(new, trace.thetas)]
    if new.size == 0:
        return trace
    new = np.unique(new)
    lv = eval_log(f, trace.radius * np.exp(1j * new))
    pos = np.searchsorted(trace.thetas, new)
    thetas = np.insert(trace.thetas, pos, new)
    lm = np.insert(trace.log_mod_values, pos, lv.log_modulus)
    arg = np.insert(trace.arg_rep, pos, lv.arg)
    return _assemble(trace.radius, trace.requested_radius, thetas, lm, arg, trace.refinement_depth)


# --------------------------------------------------------------------------
# omega
# --------------------------------------------------------------------------

def _extended(trace: CircleTrace):
    """Samples over two turns using phi(theta + 2 pi) = phi(theta) + total."""
    n = trace.thetas.size - 1
    phi = trace.arg_values
    x = np.concatenate([phi[:n], phi[: n + 1] + trace.total_increment])
    th = np.concatenate([trace.thetas[:n], trace.thetas[: n + 1] + TWO_PI])
    return x, th, n


def _sliding_min(x: np.ndarray, w: int) -> np.ndarray:
    """``out[b] = min(x[max(0, b - w + 1) : b + 1])`` in linear time."""
    L = x.size
    nb = -(-L // w)
    pad = np.full(nb * w, np.inf)
    pad[:L] = x
    blocks = pad.reshape(nb, w)
    pre = np.minimum.accumulate(blocks, axis=1).ravel()
    suf = np.minimum.accumulate(blocks[:, ::-1], axis=1)[:, ::-1].ravel()
    out = pre[:L].copy()
    b = np.arange(w - 1, L)
    out[w - 1:] = np.minimum(suf[b - w + 1], pre[b])
    return out


def omega_small(trace: CircleTrace):
    """Maximal increment of ``arg f`` over counterclockwise arcs (full circle included).

    Returns ``(omega, (theta_a, theta_b))``; ``theta_b`` may exceed ``2 pi``.
    """
    x, th, n = _extended(trace)
    mins = _sliding_min(x, n + 1)
    gains = x - mins
    b = int(np.argmax(gains))
    lo = max(0, b - n)
    a = lo + int(np.argmin(x[lo: b + 1]))
    return float(gains[b]), (float(th[a]), float(th[b]))


def omega_small_bruteforce(trace: CircleTrace) -> float:
    """O(N^2) pair scan over the same extended samples (test oracle)."""
    x, _, n = _extended(trace)
    best = -np.inf
    for b in range(x.size):
        lo = max(0, b - n)
        best = max(best, float(np.max(x[b] - x[lo: b + 1])))
    return best


# --------------------------------------------------------------------------
# Omega
# --------------------------------------------------------------------------

@dataclass(frozen=True)
class OscillationReport:
    omega: float
    omega_big: float
    zero_count: int
    im_g_osc: float
    maximizing_arc: tuple
    radius: float
    requested_radius: float
    step_bound: float
    n_samples: int


def im_g_r(f: AnalyticFunction, r: float, thetas) -> np.ndarray:
    """``Im g_r`` on ``r e^{i theta}`` up to an additive constant.

    ``g_r`` absorbs the zeros outside ``r D``; each such factor contributes
    ``arg(-zeta) + Arg(1 - z/zeta)``, which is continuous on the circle since
    ``Re(1 - z/zeta) > 0`` there.
    """
    z = r * np.exp(1j * np.asarray(thetas, dtype=float))
    gz = npoly.polyval(z, f.g) if f.g.size > 1 else np.full(z.shape, f.g[0])
    out = np.array(gz.imag, dtype=float)
    outside = np.abs(f.zeros) > r
    for zeta, m in zip(f.zeros[outside], f.multiplicities[outside]):
        out += m * np.angle(1.0 - z / zeta)
    return out


def _local_extrema_candidates(v: np.ndarray, maximum: bool, keep: int = 8) -> np.ndarray:
    """Indices (cyclic, on the n distinct samples) of the best discrete local extrema."""
    s = v if maximum else -v
    prev, nxt = np.roll(s, 1), np.roll(s, -1)
    loc = np.flatnonzero((s >= prev) & (s >= nxt))
    if loc.size == 0:
        loc = np.array([int(np.argmax(s))])
    spread = np.max(np.abs(np.diff(np.concatenate([s, s[:1]]))))
    loc = loc[s[loc] >= s.max() - 2.0 * spread]
    order = np.argsort(-s[loc], kind="stable")
    return loc[order[:keep]]


def _refine_extrema(func, thetas_closed: np.ndarray, values: np.ndarray, maximum: bool):
    """Polish discrete extrema of a smooth periodic function by bounded Brent."""
    th = thetas_closed[:-1]
    v = values[:-1]
    found = []
    for i in _local_extrema_candidates(v, maximum):
        a = th[i - 1] if i > 0 else thetas_closed[-2] - TWO_PI
        b = thetas_closed[i + 1]
        sign = -1.0 if maximum else 1.0
        res = minimize_scalar(lambda t: sign * float(func(np.array([t]))[0]),
                              bounds=(a, b), method="bounded",
                              options={"xatol": 1e-13 * max(1.0, abs(b))})
        found.append(float(res.x))
    return found


def omega_big(f: AnalyticFunction, r: float, step_tol: float = DEFAULT_STEP_TOL) -> OscillationReport:
    """``Omega(r, f) = 2 pi n(r, f) + osc Im g_r`` together with ``omega(r, f)``.

    Both are evaluated on one sample set that contains the polished extrema
    of ``Im g_r`` and of ``arg f`` near the maximising arc.
    """
    if not f.explicit_zeros:
        raise UnsupportedRepresentation(
            "Omega needs the zeros of f; the Fryntov composite 1 + p has no explicit zero list")
    trace = trace_circle(f, r, step_tol)
    rr = trace.radius
    ig = im_g_r(f, rr, trace.thetas)
    extra = _refine_extrema(lambda t: im_g_r(f, rr, t), trace.thetas, ig, True)
    extra += _refine_extrema(lambda t: im_g_r(f, rr, t), trace.thetas, ig, False)

    omega, (ta, tb) = omega_small(trace)
    if tb - ta < TWO_PI * (1 - 1e-12):
        extra += _refine_arc_end(f, trace, ta, maximum=False)
        extra += _refine_arc_end(f, trace, tb, maximum=True)
    trace = add_samples(f, trace, extra)

    omega, arc = omega_small(trace)
    ig = im_g_r(f, rr, trace.thetas)
    osc = float(ig.max() - ig.min())
    n = zeros_within(f, rr).count
    return OscillationReport(
        omega=omega,
        omega_big=TWO_PI * n + osc,
        zero_count=n,
        im_g_osc=osc,
        maximizing_arc=arc,
        radius=rr,
        requested_radius=float(r),
        step_bound=trace.step_bound,
        n_samples=trace.n_samples,
    )


def _refine_arc_end(f: AnalyticFunction, trace: CircleTrace, theta: float, maximum: bool):
    th = trace.thetas
    t0 = float(np.mod(theta, TWO_PI))
    i = int(np.argmin(np.abs(th[:-1] - t0)))
    a = th[i - 1] if i > 0 else th[-2] - TWO_PI
    b = th[i + 1]
    base_arg = trace.arg_rep[i]

    def phi_local(t):
        lv = eval_log(f, trace.radius * np.exp(1j * t))
        return reduce_angle(lv.arg - base_arg)

    sign = -1.0 if maximum else 1.0
    res = minimize_scalar(lambda t: sign * float(phi_local(np.array([t]))[0]),
                          bounds=(a, b), method="bounded", options={"xatol": 1e-13})
    return [float(res.x)]


# --------------------------------------------------------------------------
# maximum modulus and doubling exponent
# --------------------------------------------------------------------------

def max_log_modulus(f: AnalyticFunction, r: float, tol: float = 1e-9) -> float:
    """``log M(r, f)``, the maximum of ``log|f|`` on ``|z| = r``."""
    if not r > 0:
        raise ValueError("radius must be positive")
    trace = trace_circle(f, r)
    rr = trace.radius

    def logmod(t):
        return eval_log(f, rr * np.exp(1j * t)).log_modulus

    th, lm = trace.thetas, trace.log_mod_values
    for _ in range(6):
        cands = _refine_extrema(logmod, th, lm, True)
        best = max(float(lm.max()), float(np.max(logmod(np.array(cands)))))
        # stability check under one extra global bisection level
        mids = 0.5 * (th[:-1] + th[1:])
        lm_mid = logmod(mids)
        if float(lm_mid.max()) <= best + tol:
            return best
        th = np.sort(np.concatenate([th, mids, np.mod(cands, TWO_PI)]))
        th = np.unique(th)
        lm = logmod(th)
    return max(best, float(lm_mid.max()))


def doubling_exponent(f: AnalyticFunction, r: float):
    """``beta = log M(r) - log M(r/2)`` and ``beta* = max(beta, 2)``."""
    beta = max_log_modulus(f, r) - max_log_modulus(f, 0.5 * r)
    return beta, max(beta, 2.0)
