"""Scalar Lennard-Jones profile, zeta values and the characteristic distances.

The chain energy is built from the one-dimensional profile

    L(h) = A / h**alpha - B / h**beta,      alpha > beta > 1,

and every distance or threshold in the package is a closed form in the
model constants and a handful of zeta values.
"""
from __future__ import annotations

import math
from dataclasses import asdict, dataclass
from functools import lru_cache

import numpy as np

from .errors import ConvergenceError, DomainError

__all__ = [
    "LJParams",
    "DistanceSet",
    "lj_value",
    "lj_d1",
    "lj_d2",
    "lj_d3",
    "lattice_sharp",
    "lattice_flat",
    "zeta",
    "zeta_minus_one",
    "characteristic_distances",
    "distance_log_gaps",
    "F_beta",
    "G_beta",
    "alpha_dag",
    "alpha_star",
]


@dataclass(frozen=True)
class LJParams:
    """Model constants shared by the dipolar and repulsive potentials.

    ``A``/``alpha`` set the soft-sphere repulsion ``A / r**alpha``; ``B``,
    ``B0``/``beta`` the generalised dipolar interaction.  The physical
    dipole is recovered with ``B0=1, B=2, beta=3``.
    """

    A: float = 1.0
    B: float = 1.0
    B0: float = 1.0
    alpha: float = 12.0
    beta: float = 3.0

    def __post_init__(self):
        for name in ("A", "B", "B0", "alpha", "beta"):
            val = getattr(self, name)
            if not isinstance(val, (int, float, np.floating, np.integer)) or not math.isfinite(val):
                raise DomainError(f"{name} must be a finite real number, got {val!r}")
            object.__setattr__(self, name, float(val))
        for name in ("A", "B", "B0"):
            if getattr(self, name) <= 0:
                raise DomainError(f"{name} must be positive, got {getattr(self, name)}")
        if not self.beta > 1:
            raise DomainError(f"beta must exceed 1, got {self.beta}")
        if not self.alpha > self.beta:
            raise DomainError(f"alpha must exceed beta, got alpha={self.alpha}, beta={self.beta}")

    @classmethod
    def soft_sphere(cls, a, R, alpha, beta, B=1.0, B0=None):
        """Repulsion amplitude ``A = a * R**alpha`` (R the contact distance)."""
        return cls(A=a * R**alpha, B=B, B0=B if B0 is None else B0, alpha=alpha, beta=beta)

    def as_dict(self):
        return asdict(self)


def _check_positive(h):
    h = np.asarray(h, dtype=float)
    if np.any(~(h > 0)):
        raise DomainError("distances must be strictly positive")
    return h


def _out(x):
    return float(x) if np.ndim(x) == 0 else x


def lj_value(h, p: LJParams):
    h = _check_positive(h)
    return _out(p.A * h ** -p.alpha - p.B * h ** -p.beta)


def lj_d1(h, p: LJParams):
    h = _check_positive(h)
    return _out(-p.alpha * p.A * h ** (-p.alpha - 1) + p.beta * p.B * h ** (-p.beta - 1))


def lj_d2(h, p: LJParams):
    h = _check_positive(h)
    a, b = p.alpha, p.beta
    return _out(a * (a + 1) * p.A * h ** (-a - 2) - b * (b + 1) * p.B * h ** (-b - 2))


def lj_d3(h, p: LJParams):
    h = _check_positive(h)
    a, b = p.alpha, p.beta
    return _out(-a * (a + 1) * (a + 2) * p.A * h ** (-a - 3) + b * (b + 1) * (b + 2) * p.B * h ** (-b - 3))


def lattice_sharp(x, p: LJParams):
    """sum_{l>=1} L'(l x): the end-of-chain balance."""
    x = _check_positive(x)
    return _out(p.beta * p.B * zeta(p.beta + 1) * x ** (-p.beta - 1)
                - p.alpha * p.A * zeta(p.alpha + 1) * x ** (-p.alpha - 1))


def lattice_flat(x, p: LJParams):
    """sum_{l>=1} l L'(l x): the bulk balance."""
    x = _check_positive(x)
    return _out(p.beta * p.B * zeta(p.beta) * x ** (-p.beta - 1)
                - p.alpha * p.A * zeta(p.alpha) * x ** (-p.alpha - 1))


# ---------------------------------------------------------------------------
# zeta


@lru_cache(maxsize=4096)
def _power_sum(s, start, tol_abs):
    """sum_{k>=start} k**-s to absolute accuracy ``tol_abs``.

    Explicit terms up to K, then the midpoint tail int_{K+1/2}^inf t**-s dt.
    For the convex summand that tail overestimates by at most
    s/24 (K-1/2)**(-s-1), which fixes K; the leading part of the excess,
    s/24 (K+1/2)**(-s-1), is subtracted.
    """
    K = int(math.ceil((s / (12.0 * tol_abs)) ** (1.0 / (s + 1.0)) + 0.5))
    K = max(K, start + 8)
    k = np.arange(K, start - 1, -1, dtype=float)  # smallest terms first
    head = float(np.sum(k ** -s))
    tail = (K + 0.5) ** (1.0 - s) / (s - 1.0) - s / 24.0 * (K + 0.5) ** (-s - 1.0)
    return head + tail


def zeta(s, tol=1e-12):
    """Riemann zeta for real ``s > 1`` to absolute tolerance ``tol``."""
    s = float(s)
    if not s > 1:
        raise DomainError(f"zeta needs s > 1, got {s}")
    if not tol > 0:
        raise DomainError("tol must be positive")
    return 1.0 + _power_sum(s, 2, float(tol))


def zeta_minus_one(s, rtol=1e-12):
    """``zeta(s) - 1`` to relative tolerance, usable where zeta(s) rounds to 1."""
    s = float(s)
    if not s > 1:
        raise DomainError(f"zeta needs s > 1, got {s}")
    return _power_sum(s, 2, float(rtol) * 2.0 ** -s)


def _log_zeta(s):
    return math.log1p(zeta_minus_one(s))


# ---------------------------------------------------------------------------
# distances


@dataclass(frozen=True)
class DistanceSet:
    h_check: float
    h_bar: float
    h_hat: float
    h_tilde: float
    h_dag: float
    h_ddag: float
    h_sharp: float
    h_flat: float

    def as_dict(self):
        return asdict(self)


def characteristic_distances(p: LJParams) -> DistanceSet:
    a, b = p.alpha, p.beta
    e = 1.0 / (a - b)
    base = math.log(a * p.A / (b * p.B))

    def dist(log_ratio):
        return math.exp(log_ratio * e)

    lz = {s: _log_zeta(s) for s in (a, a + 1, b, b + 1)}
    return DistanceSet(
        h_check=dist(base - lz[b]),
        h_bar=dist(base + lz[a] - lz[b]),
        h_hat=dist(base),
        h_tilde=dist(base + lz[a + 1] - lz[b + 1]),
        h_dag=dist(base + math.log((a + 1) / (b + 1))),
        h_ddag=dist(base + math.log((a + 1) * (a + 2) / ((b + 1) * (b + 2)))),
        h_sharp=dist(base + math.log((a + 1) / (b + 1)) + lz[a + 1] - lz[b + 1]),
        h_flat=dist(base + math.log((a + 1) / (b + 1)) + lz[a] - lz[b]),
    )


def distance_log_gaps(p: LJParams):
    """Logarithmic gaps log(h_bar/h_check), log(h_tilde/h_bar), log(h_hat/h_tilde).

    For large alpha, zeta(alpha) - 1 ~ 2**-alpha falls below double
    precision relative to 1 and h_check, h_bar round to the same float;
    the gaps are evaluated from zeta(s) - 1 directly so their sign stays
    resolvable.
    """
    a, b = p.alpha, p.beta
    za, za1 = zeta_minus_one(a), zeta_minus_one(a + 1)
    zb, zb1 = zeta_minus_one(b), zeta_minus_one(b + 1)
    e = 1.0 / (a - b)
    g1 = math.log1p(za) * e
    # log zeta(b) - log zeta(b+1) - (log zeta(a) - log zeta(a+1)), both brackets > 0
    g2 = (math.log1p((zb - zb1) / (1.0 + zb1)) - math.log1p((za - za1) / (1.0 + za1))) * e
    g3 = (math.log1p(zb1) - math.log1p(za1)) * e
    return g1, g2, g3


# ---------------------------------------------------------------------------
# thresholds


def F_beta(alpha, beta):
    x = alpha - beta
    zb = zeta(beta)
    expo = (beta + 2.0) / x * math.log(zb)
    if expo > 700.0:
        return -math.inf
    return x - math.exp(expo) * (beta + 1.0) * (zeta(beta + 1) + zb - 2.0)


def G_beta(alpha, beta):
    x = alpha - beta
    zb = zeta(beta)
    delta = 2.0 * (1.0 + 2.0**beta) * zb
    pref = 2.0 / (delta + math.sqrt(delta**2 + 8.0 * zeta(2.0 * beta)))
    expo = (beta + 2.0) / x * math.log(zb)
    if expo > 700.0:
        first = 0.0
    else:
        first = beta * x / ((beta + 1.0) * math.exp(expo))
    return pref * (first - beta * (zeta(beta + 1) - 1.0)) - 1.0


def _largest_zero(f, beta, tol, cap=1e6, factor=1.5):
    """Largest zero of ``alpha -> f(alpha)`` on (beta, beta + cap].

    Offsets alpha - beta are scanned geometrically from 10*tol; the last
    sign change found is refined by bisection.  Both threshold functions
    tend to +inf, so nothing past the cap can change sign again.
    """
    x = 10.0 * tol
    fx = f(beta + x)
    bracket = None
    while x < cap:
        xn = min(x * factor, cap)
        fn = f(beta + xn)
        if (fx < 0) != (fn < 0):
            bracket = (x, xn, fx, fn)
        x, fx = xn, fn
    if bracket is None:
        raise ConvergenceError(f"no sign change found for beta={beta} below offset {cap:g}")
    lo, hi, flo, fhi = bracket
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        fm = f(beta + mid)
        if fm == 0:
            return beta + mid
        if (fm < 0) == (flo < 0):
            lo, flo = mid, fm
        else:
            hi, fhi = mid, fm
    # final secant step inside the bracket
    if math.isfinite(flo) and math.isfinite(fhi) and fhi != flo:
        return beta + lo - flo * (hi - lo) / (fhi - flo)
    return beta + 0.5 * (lo + hi)


def alpha_dag(beta, tol=1e-8):
    """Uniqueness threshold: largest zero of F_beta."""
    if not beta > 1:
        raise DomainError(f"beta must exceed 1, got {beta}")
    return _largest_zero(lambda a: F_beta(a, beta), float(beta), tol)


def alpha_star(beta, tol=1e-8):
    """Asymptotics threshold: largest zero of G_beta."""
    if not beta > 1:
        raise DomainError(f"beta must exceed 1, got {beta}")
    return _largest_zero(lambda a: G_beta(a, beta), float(beta), tol)
