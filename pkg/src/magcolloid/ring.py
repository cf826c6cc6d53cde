"""Particles equally spaced on a circle with tangential spins.

On the ring every particle sees the same environment, so the energy
gradient has one radial and one spin component and the critical radius is
explicit: r* = (A_N / B_N)**(1/(alpha - beta)) with the two trigonometric
sums below.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import optimize

from . import kernels
from .dynamics import SystemState
from .errors import DomainError
from .potential import LJParams, characteristic_distances, zeta


@dataclass(frozen=True)
class RingSolution:
    n: int
    a_tilde: float
    b_tilde: float
    radius: float
    nn_distance: float
    bisection_radius: float

    def as_dict(self):
        return {
            "N": self.n, "A_tilde": self.a_tilde, "B_tilde": self.b_tilde,
            "r_star": self.radius, "nn_distance": self.nn_distance,
            "r_bisection": self.bisection_radius,
        }


def ring_sums(N: int, p: LJParams):
    """(A_N, B_N), summed over j = 1..N-1 with compensated accumulation."""
    N = int(N)
    if N < 2:
        raise DomainError("a ring needs N >= 2")
    a, b = kernels.ring_sums(N, p.A, p.B, p.B0, p.alpha, p.beta)
    return float(a), float(b)


def ring_sums_reversed(N: int, p: LJParams):
    """Same sums accumulated from j = N-1 down to 1 (symmetry check)."""
    j = np.arange(N - 1, 0, -1, dtype=float)
    s = np.sin(j * math.pi / N)
    c = np.cos(j * math.pi / N)
    a = p.alpha * p.A / 2 ** (p.alpha + 1) * math.fsum(s ** -p.alpha)
    b = p.beta / 2 ** (p.beta + 1) * math.fsum(s ** -p.beta * (p.B * c**2 + p.B0 * s**2))
    return a, b


def radial_function(r, a_tilde, b_tilde, p: LJParams):
    """A_N / r**(alpha+1) - B_N / r**(beta+1): minus the radial gradient per particle."""
    return a_tilde / r ** (p.alpha + 1) - b_tilde / r ** (p.beta + 1)


def _bisect_radius(a_tilde, b_tilde, p):
    # the scaled function (A/B) r**(beta-alpha) - 1 has the same unique zero
    ratio = a_tilde / b_tilde

    def f(r):
        return ratio * r ** (p.beta - p.alpha) - 1.0

    lo, hi = 1.0, 1.0
    while f(lo) < 0:
        lo *= 0.5
    while f(hi) > 0:
        hi *= 2.0
    return optimize.bisect(f, lo, hi, xtol=1e-300, rtol=4 * np.finfo(float).eps, maxiter=2000)


def ring_radius(N: int, p: LJParams) -> RingSolution:
    a_t, b_t = ring_sums(N, p)
    r = (a_t / b_t) ** (1.0 / (p.alpha - p.beta))
    return RingSolution(
        n=int(N), a_tilde=a_t, b_tilde=b_t, radius=r,
        nn_distance=2.0 * r * math.sin(math.pi / N),
        bisection_radius=_bisect_radius(a_t, b_t, p),
    )


def ring_configuration(N: int, r: float) -> SystemState:
    N = int(N)
    if N < 2:
        raise DomainError("a ring needs N >= 2")
    if not r > 0:
        raise DomainError("radius must be positive")
    th = 2.0 * math.pi * np.arange(N) / N
    c, s = np.cos(th), np.sin(th)
    z = np.zeros(N)
    return SystemState(x=r * np.column_stack((c, s, z)), m=np.column_stack((-s, c, z)))


def ring_gradients(N: int, r: float, p: LJParams):
    """Closed-form dU/dx_k and dU/dm_k on the ring of radius r."""
    a_t, b_t = ring_sums(N, p)
    st = ring_configuration(N, r)
    radial = -a_t / r ** (p.alpha + 1) + b_t / r ** (p.beta + 1)
    s = np.sin(np.arange(1, N) * math.pi / N)
    spin = math.fsum((p.B - p.B0) * s ** (2 - p.beta) - p.B * s ** -p.beta) / (2 * r) ** p.beta
    return radial * st.x / r, spin * st.m


def ring_gradient_check(N: int, p: LJParams, r: float | None = None) -> dict:
    """Compare the closed forms with the generic pairwise gradient.

    All residuals are scaled by max(|closed form|, A_N / r**(alpha+1)); the
    second term keeps the scale meaningful at r*, where the radial part
    vanishes.
    """
    if N < 3:
        raise DomainError("gradient check needs N >= 3")
    sol = ring_radius(N, p)
    r = sol.radius if r is None else float(r)
    st = ring_configuration(N, r)
    gx_c, gm_c = ring_gradients(N, r, p)
    _, gx, gm = kernels.pair_gradients(st.x, st.m, p.A, p.B, p.B0, p.alpha, p.beta)
    gx, gm = np.asarray(gx), np.asarray(gm)
    scale = max(np.max(np.abs(gx_c)), np.max(np.abs(gm_c)), sol.a_tilde / r ** (p.alpha + 1))
    rhat = st.x / r
    radial = np.sum(gx * rhat, axis=1)
    tangential = np.sum(gx * st.m, axis=1)
    spin_perp = gm - np.sum(gm * st.m, axis=1)[:, None] * st.m
    return {
        "N": N,
        "r": r,
        "scale": scale,
        "rel_diff": float(max(np.max(np.abs(gx - gx_c)), np.max(np.abs(gm - gm_c))) / scale),
        "radial_force": float(np.max(np.abs(radial)) / scale),
        "tangential_force": float(np.max(np.abs(tangential)) / scale),
        "out_of_plane_force": float(np.max(np.abs(gx[:, 2])) / scale),
        "spin_non_collinear": float(np.max(np.abs(spin_perp)) / scale),
    }


def expected_rate(beta):
    """Upper-bound regime for |nn distance - h_bar|: (exponent, log power)."""
    if beta > 3:
        return -2.0, 0
    if beta == 3:
        return -2.0, 1
    return 1.0 - beta, 0


def ring_asymptotics(p: LJParams, Ns, skip: int = 2) -> dict:
    """Nearest-neighbour error against h_bar over an N-sweep.

    The log-log slope is fitted with the ``skip`` smallest N left out.
    For beta = 3 the scaled error err * N**2 / log N is also tabulated.
    """
    Ns = [int(n) for n in Ns]
    if any(b <= a for a, b in zip(Ns, Ns[1:])):
        raise DomainError("Ns must be strictly increasing")
    if min(Ns) < 8:
        raise DomainError("ring asymptotics need N >= 8")
    h_bar = characteristic_distances(p).h_bar
    rows = []
    for N in Ns:
        sol = ring_radius(N, p)
        err = abs(sol.nn_distance - h_bar)
        rows.append({
            "N": N, "r_star": sol.radius, "nn_distance": sol.nn_distance,
            "nn_error": err, "circumference_ratio": 2 * math.pi * sol.radius / N,
            "scaled_log": err * N**2 / math.log(N),
        })
    fitN = Ns[skip:] if len(Ns) - skip >= 2 else Ns
    fitE = [r["nn_error"] for r in rows][len(Ns) - len(fitN):]
    slope = float(np.polyfit(np.log(fitN), np.log(fitE), 1)[0])
    exponent, logpow = expected_rate(p.beta)
    regime = {(-2.0, 0): "N^-2", (-2.0, 1): "N^-2 log N"}.get((exponent, logpow), f"N^{exponent:g}")
    return {"rows": rows, "h_bar": h_bar, "slope": slope, "expected_exponent": exponent,
            "regime": regime, "max_scaled_log": max(r["scaled_log"] for r in rows)}


def a_tilde_leading(N, p: LJParams):
    """Leading large-N behaviour alpha A N**alpha zeta(alpha) / (2 pi)**alpha."""
    return p.alpha * p.A * N**p.alpha * zeta(p.alpha) / (2 * math.pi) ** p.alpha


__all__ = [
    "RingSolution", "ring_sums", "ring_sums_reversed", "radial_function", "ring_radius",
    "ring_configuration", "ring_gradients", "ring_gradient_check", "ring_asymptotics",
    "expected_rate", "a_tilde_leading",
]
