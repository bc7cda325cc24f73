"""Analytic function representations and log-space evaluation.

Every function is stored in factored form

    f(z) = offset + exp(g(z)) * prod_j (z - zeta_j)**m_j

with ``offset`` either 0 or 1 (the latter only for the Fryntov family).
Evaluation never forms ``f`` directly: ``log|f|`` and ``arg f`` are summed
term by term so that products with hundreds of zeros at radii like 1e7 stay
finite.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import NamedTuple, Sequence, Union

import numpy as np
from numpy.polynomial import polynomial as npoly

TWO_PI = 2.0 * math.pi

# raw complex values are rebuilt only below this log-modulus
LOG_OVERFLOW = 700.0


class SpecError(ValueError):
    """Invalid function specification."""


class SingularityError(ArithmeticError):
    """Evaluation requested at (or numerically at) a zero of f."""


# --------------------------------------------------------------------------
# specifications
# --------------------------------------------------------------------------

@dataclass(frozen=True)
class ZeroEntry:
    location: complex
    multiplicity: int = 1

    def __post_init__(self):
        loc = complex(self.location)
        if not (math.isfinite(loc.real) and math.isfinite(loc.imag)):
            raise SpecError(f"zero location must be finite, got {self.location!r}")
        if int(self.multiplicity) != self.multiplicity or self.multiplicity < 1:
            raise SpecError(f"multiplicity must be a positive integer, got {self.multiplicity!r}")
        object.__setattr__(self, "location", loc)
        object.__setattr__(self, "multiplicity", int(self.multiplicity))


@dataclass(frozen=True)
class Monomial:
    n: int


@dataclass(frozen=True)
class Polynomial:
    """Coefficients in ascending order: ``c[0] + c[1] z + ...``."""
    coefficients: tuple


@dataclass(frozen=True)
class ZeroProduct:
    """``exp(g(z)) * prod (z - zeta)**m``; ``g`` ascending coefficients."""
    zeros: tuple
    g: tuple = (0.0,)


@dataclass(frozen=True)
class CanonicalProduct:
    """``prod_k (1 - z/rho_k)**m_k`` with zeros on the positive real axis."""
    moduli: tuple  # ((rho_k, m_k), ...)


@dataclass(frozen=True)
class Fryntov:
    """``1 + prod_{k<=K} (1 - z/T**k)**floor(T**(k*rho))``."""
    T: float
    rho: float
    K: int


@dataclass(frozen=True)
class ExpPoly:
    g: tuple


FunctionSpec = Union[Monomial, Polynomial, ZeroProduct, CanonicalProduct, Fryntov, ExpPoly]


def _as_zero_entry(item) -> ZeroEntry:
    if isinstance(item, ZeroEntry):
        return item
    if isinstance(item, (tuple, list)) and len(item) == 2:
        return ZeroEntry(complex(item[0]), item[1])
    return ZeroEntry(complex(item), 1)


def fryntov_multiplicity(T: float, rho: float, k: int) -> int:
    # the relative nudge keeps exact integers such as 10**(0.5*4) from flooring down
    return int(math.floor(T ** (k * rho) * (1.0 + 1e-12)))


def fryntov_default_K(T: float, r_max: float) -> int:
    """Smallest truncation with ``T**K >= 100 * r_max``."""
    if T <= 1:
        raise SpecError("Fryntov requires T > 1")
    return max(1, math.ceil(math.log(100.0 * r_max) / math.log(T) - 1e-12))


def fryntov_tail_bound(T: float, rho: float, K: int, r: float, max_terms: int = 400) -> float:
    """Bound ``sum_{k>K} floor(T**(k rho)) * r / T**k`` on the dropped factors.

    Infinite when the series diverges (rho >= 1).
    """
    if rho >= 1.0:
        return math.inf
    total = 0.0
    for k in range(K + 1, K + 1 + max_terms):
        # log-space term avoids overflow of T**k for large k
        term = math.exp(math.log(fryntov_multiplicity(T, rho, k)) + math.log(r) - k * math.log(T)) if r > 0 else 0.0
        total += term
        if term <= 1e-17 * max(total, 1e-300):
            break
    return total


# --------------------------------------------------------------------------
# the evaluated representation
# --------------------------------------------------------------------------

def _frozen(a: np.ndarray) -> np.ndarray:
    a = np.ascontiguousarray(a)
    a.setflags(write=False)
    return a


@dataclass(frozen=True, eq=False)
class AnalyticFunction:
    zeros: np.ndarray          # complex, sorted by (|zeta|, angle)
    multiplicities: np.ndarray  # int64
    g: np.ndarray              # complex, ascending coefficients of the exponent
    offset: float = 0.0
    domain_radius: float = math.inf
    spec: object = None
    order: float | None = None
    _dg: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        zeros = np.asarray(self.zeros, dtype=complex).ravel()
        mults = np.asarray(self.multiplicities, dtype=np.int64).ravel()
        if zeros.shape != mults.shape:
            raise SpecError("zeros and multiplicities differ in length")
        if np.any(mults < 1):
            raise SpecError("multiplicities must be >= 1")
        if not np.all(np.isfinite(zeros)):
            raise SpecError("zero locations must be finite")
        order = np.lexsort((np.angle(zeros), np.abs(zeros)))
        zeros, mults = zeros[order], mults[order]
        if zeros.size and np.abs(zeros[-1]) >= self.domain_radius:
            raise SpecError("zeros must lie inside the domain radius")
        g = np.asarray(self.g, dtype=complex).ravel()
        if g.size == 0:
            g = np.zeros(1, dtype=complex)
        object.__setattr__(self, "zeros", _frozen(zeros))
        object.__setattr__(self, "multiplicities", _frozen(mults))
        object.__setattr__(self, "g", _frozen(g))
        object.__setattr__(self, "_dg", _frozen(npoly.polyder(g) if g.size > 1 else np.zeros(1, dtype=complex)))

    @property
    def explicit_zeros(self) -> bool:
        """True when the stored zeros are the zeros of f itself."""
        return self.offset == 0.0

    @property
    def degree(self) -> int:
        return int(self.multiplicities.sum())

    @property
    def zero_moduli(self) -> np.ndarray:
        return np.unique(np.abs(self.zeros))

    def times(self, c: complex) -> "AnalyticFunction":
        """Return ``c * f`` for the factored (offset-free) representation."""
        if not self.explicit_zeros:
            raise SpecError("scaling is defined only for offset-free functions")
        if c == 0:
            raise SpecError("cannot scale by zero")
        g = np.array(self.g, dtype=complex)
        g[0] += np.log(complex(c))
        return AnalyticFunction(self.zeros, self.multiplicities, g, 0.0,
                                self.domain_radius, None, self.order)

    def dilate(self, lam: float) -> "AnalyticFunction":
        """Return ``z -> f(lam z)`` for real ``lam > 0`` (offset-free only)."""
        if not self.explicit_zeros:
            raise SpecError("dilation is defined only for offset-free functions")
        lam = float(lam)
        g = np.array(self.g, dtype=complex) * lam ** np.arange(self.g.size)
        # (lam z - zeta) = lam (z - zeta/lam)
        g[0] += self.degree * math.log(lam)
        return AnalyticFunction(self.zeros / lam, self.multiplicities, g, 0.0,
                                self.domain_radius / lam, None, self.order)


def _polish_roots(coeffs: np.ndarray, roots: np.ndarray, max_iter: int = 60) -> np.ndarray:
    """Newton-polish roots of the ascending-coefficient polynomial."""
    d1 = npoly.polyder(coeffs)
    absc = np.abs(coeffs)
    out = roots.astype(complex).copy()
    for i, z in enumerate(out):
        for _ in range(max_iter):
            p = npoly.polyval(z, coeffs)
            scale = npoly.polyval(abs(z), absc)
            if abs(p) <= 1e-12 * scale:
                break
            dp = npoly.polyval(z, d1)
            if dp == 0:
                break
            step = p / dp
            z_new = z - step
            # reject steps that make the residual worse (multiple roots)
            if abs(npoly.polyval(z_new, coeffs)) >= abs(p):
                break
            z = z_new
        out[i] = z
    return out


def build_function(spec: FunctionSpec, order: float | None = None) -> AnalyticFunction:
    """Construct the immutable factored representation of ``spec``."""
    if isinstance(spec, Monomial):
        if int(spec.n) != spec.n or spec.n < 1:
            raise SpecError(f"Monomial degree must be a positive integer, got {spec.n!r}")
        return AnalyticFunction(np.zeros(1, complex), np.array([int(spec.n)]), [0.0],
                                spec=spec, order=0.0 if order is None else order)

    if isinstance(spec, Polynomial):
        c = np.asarray(spec.coefficients, dtype=complex).ravel()
        if c.size == 0 or not np.all(np.isfinite(c)):
            raise SpecError("polynomial needs finite coefficients")
        nz = np.flatnonzero(c)
        if nz.size == 0:
            raise SpecError("zero polynomial")
        c = c[: nz[-1] + 1]
        if c.size < 2:
            raise SpecError("constant polynomial")
        k0 = int(nz[0])  # exact zero at the origin of multiplicity k0
        reduced = c[k0:]
        roots = np.empty(0, complex)
        if reduced.size > 1:
            roots = _polish_roots(reduced, npoly.polyroots(reduced))
        zeros = np.concatenate([np.zeros(1 if k0 else 0, complex), roots])
        mults = np.concatenate([np.array([k0] if k0 else [], dtype=np.int64),
                                np.ones(roots.size, dtype=np.int64)])
        return AnalyticFunction(zeros, mults, [np.log(c[-1])], spec=spec,
                                order=0.0 if order is None else order)

    if isinstance(spec, ZeroProduct):
        entries = [_as_zero_entry(e) for e in spec.zeros]
        zeros = np.array([e.location for e in entries], dtype=complex)
        mults = np.array([e.multiplicity for e in entries], dtype=np.int64)
        g = np.asarray(spec.g, dtype=complex)
        if not np.all(np.isfinite(g)):
            raise SpecError("exponent coefficients must be finite")
        if order is None:
            order = float(max(np.flatnonzero(g).max(initial=0), 0)) if g.size else 0.0
        return AnalyticFunction(zeros, mults, g, spec=spec, order=order)

    if isinstance(spec, CanonicalProduct):
        rhos = np.array([float(m[0]) for m in spec.moduli])
        counts = np.array([int(m[1]) for m in spec.moduli], dtype=np.int64)
        if rhos.size == 0:
            raise SpecError("canonical product needs at least one modulus")
        if np.any(rhos <= 0) or not np.all(np.isfinite(rhos)):
            raise SpecError("canonical product moduli must be positive and finite")
        if np.any(counts < 1):
            raise SpecError("canonical product counts must be >= 1")
        # (1 - z/rho) = (-1/rho) (z - rho)
        g0 = complex(np.sum(counts * (-np.log(rhos))), math.pi * float(counts.sum() % 2))
        return AnalyticFunction(rhos.astype(complex), counts, [g0], spec=spec,
                                order=0.0 if order is None else order)

    if isinstance(spec, Fryntov):
        T, rho, K = float(spec.T), float(spec.rho), spec.K
        if not T > 1:
            raise SpecError(f"Fryntov requires T > 1, got {spec.T!r}")
        if not 0 < rho <= 1:
            raise SpecError(f"Fryntov requires rho in (0, 1], got {spec.rho!r}")
        if int(K) != K or K < 1:
            raise SpecError(f"Fryntov requires integer K >= 1, got {spec.K!r}")
        ks = np.arange(1, int(K) + 1)
        rhos = T ** ks.astype(float)
        counts = np.array([fryntov_multiplicity(T, rho, int(k)) for k in ks], dtype=np.int64)
        g0 = complex(np.sum(counts * (-np.log(rhos))), math.pi * float(counts.sum() % 2))
        return AnalyticFunction(rhos.astype(complex), counts, [g0], offset=1.0, spec=spec,
                                order=rho if order is None else order)

    if isinstance(spec, ExpPoly):
        g = np.asarray(spec.g, dtype=complex).ravel()
        if g.size == 0 or not np.all(np.isfinite(g)):
            raise SpecError("ExpPoly needs finite coefficients")
        if order is None:
            nz = np.flatnonzero(g[1:])
            order = float(nz[-1] + 1) if nz.size else 0.0
        return AnalyticFunction(np.empty(0, complex), np.empty(0, np.int64), g, spec=spec, order=order)

    raise SpecError(f"unknown function spec {spec!r}")


# --------------------------------------------------------------------------
# evaluation
# --------------------------------------------------------------------------

class LogValue(NamedTuple):
    """``log|f|`` and a principal representative of ``arg f`` in (-pi, pi].

    ``arg`` is NaN where ``log_modulus`` is -inf (f vanishes).
    """
    log_modulus: np.ndarray
    arg: np.ndarray

    @property
    def defined(self) -> np.ndarray:
        return np.isfinite(self.log_modulus)


def reduce_angle(x):
    """Map angles into (-pi, pi]."""
    return math.pi - np.remainder(math.pi - np.asarray(x, dtype=float), TWO_PI)


def _product_log(f: AnalyticFunction, z: np.ndarray):
    gz = npoly.polyval(z, f.g) if f.g.size > 1 else np.full(z.shape, f.g[0])
    logmod = np.array(gz.real, dtype=float)
    arg = reduce_angle(gz.imag)
    with np.errstate(divide="ignore"):
        for zeta, m in zip(f.zeros, f.multiplicities):
            d = z - zeta
            logmod += m * np.log(np.abs(d))
            a = np.angle(d)
            arg = reduce_angle(arg + (a if m == 1 else m * a))
    return logmod, arg


def _log1p_abs(w: np.ndarray) -> np.ndarray:
    return 0.5 * np.log1p(2.0 * w.real + (w.real ** 2 + w.imag ** 2))


def _add_one(L: np.ndarray, a: np.ndarray):
    """log|1 + p| and arg(1 + p) from log|p| = L, arg p = a."""
    big = L > 0
    logmod = np.empty_like(L)
    arg = np.empty_like(L)
    with np.errstate(over="ignore", invalid="ignore", divide="ignore"):
        Lb, ab = L[big], a[big]
        w = np.exp(-Lb) * np.exp(-1j * ab)
        logmod[big] = Lb + _log1p_abs(w)
        arg[big] = reduce_angle(ab + np.angle(1.0 + w))
        small = ~big
        Ls, as_ = L[small], np.where(np.isnan(a[small]), 0.0, a[small])
        w = np.exp(Ls) * np.exp(1j * as_)
        logmod[small] = _log1p_abs(w)
        arg[small] = np.angle(1.0 + w)
    return logmod, arg


def eval_log(f: AnalyticFunction, z) -> LogValue:
    """Evaluate ``log|f(z)|`` and ``arg f(z)`` (vectorised over ``z``)."""
    scalar = np.isscalar(z)
    z = np.asarray(z, dtype=complex)
    logmod, arg = _product_log(f, z)
    if f.offset:
        logmod, arg = _add_one(logmod, arg)
    arg = np.where(np.isfinite(logmod), arg, np.nan)
    if scalar:
        return LogValue(float(logmod), float(arg))
    return LogValue(logmod, arg)


def eval_complex(f: AnalyticFunction, z) -> np.ndarray:
    """Raw values of f, refusing to leave the overflow-safe range."""
    lv = eval_log(f, z)
    lm = np.asarray(lv.log_modulus)
    if np.any(lm >= LOG_OVERFLOW):
        raise OverflowError("|f| exceeds exp(700); use eval_log")
    with np.errstate(invalid="ignore"):
        out = np.where(np.isfinite(lm), np.exp(lm + 1j * np.nan_to_num(lv.arg)), 0.0)
    return out if out.ndim else complex(out)


def _product_logderiv(f: AnalyticFunction, z: np.ndarray) -> np.ndarray:
    out = npoly.polyval(z, f._dg) if f._dg.size > 1 else np.full(z.shape, f._dg[0], dtype=complex)
    out = np.array(out, dtype=complex)
    with np.errstate(divide="ignore", invalid="ignore"):
        for zeta, m in zip(f.zeros, f.multiplicities):
            out += m / (z - zeta)
    return out


def logderiv_array(f: AnalyticFunction, z) -> np.ndarray:
    """``f'/f`` without singularity checks; non-finite at zeros."""
    z = np.asarray(z, dtype=complex)
    dp = _product_logderiv(f, z)
    if not f.offset:
        return dp
    L, a = _product_log(f, z)
    with np.errstate(over="ignore", invalid="ignore", divide="ignore"):
        big = L > 0
        w = np.where(big, np.exp(-np.where(big, L, 0.0)) * np.exp(-1j * a),
                     np.exp(np.where(big, 0.0, L)) * np.exp(1j * np.nan_to_num(a)))
        q = np.where(big, 1.0 / (1.0 + w), w / (1.0 + w))  # p / (1 + p)
        out = dp * q
    # at a zero of p the composite is 1 + 0 and f'/f = p'(zeta)
    hits = ~np.isfinite(L)
    if np.any(hits):
        out = np.array(out, dtype=complex)
        for idx in zip(*np.nonzero(hits)):
            out[idx] = _p_prime_at_zero(f, complex(z[idx]))
    return out


def _p_prime_at_zero(f: AnalyticFunction, z: complex) -> complex:
    k = int(np.argmin(np.abs(f.zeros - z)))
    if f.multiplicities[k] > 1:
        return 0j
    others = np.ones(f.zeros.size, bool)
    others[k] = False
    gz = complex(npoly.polyval(z, f.g))
    log_p = gz + complex(np.sum(f.multiplicities[others] * np.log((z - f.zeros[others]).astype(complex))))
    return complex(np.exp(log_p))


def log_derivative(f: AnalyticFunction, z: complex) -> complex:
    """Return ``f'(z)/f(z)``; its modulus is ``|grad arg f|``."""
    z = complex(z)
    if f.zeros.size and f.explicit_zeros:
        if np.min(np.abs(z - f.zeros)) <= 1e-12 * (1.0 + abs(z)):
            raise SingularityError(f"z={z} is at a zero of f")
    if f.offset:
        L, a = _product_log(f, np.atleast_1d(z))
        lm, _ = _add_one(L, a)
        if float(lm[0]) - max(0.0, float(L[0])) < -28.0:
            raise SingularityError(f"z={z} is numerically at a zero of 1 + p")
    val = complex(logderiv_array(f, np.asarray(z)))
    if not (math.isfinite(val.real) and math.isfinite(val.imag)):
        raise SingularityError(f"f'/f is not finite at z={z}")
    return val


class ZeroCount(NamedTuple):
    count: int
    entries: list
    product_part: bool  # True when the entries are zeros of p, not of f = 1 + p


def zeros_within(f: AnalyticFunction, r: float) -> ZeroCount:
    """``n(r, f)``: zeros in the closed disc of radius ``r`` with multiplicity."""
    if not r > 0:
        raise ValueError("radius must be positive")
    mask = np.abs(f.zeros) <= r
    entries = [ZeroEntry(complex(z), int(m)) for z, m in zip(f.zeros[mask], f.multiplicities[mask])]
    return ZeroCount(int(f.multiplicities[mask].sum()), entries, not f.explicit_zeros)


def fryntov_truncation_bound(f: AnalyticFunction, r: float) -> float:
    """Tail bound for a truncated Fryntov function at radius ``r`` (0 otherwise)."""
    if isinstance(f.spec, Fryntov):
        return fryntov_tail_bound(float(f.spec.T), float(f.spec.rho), int(f.spec.K), r)
    return 0.0
