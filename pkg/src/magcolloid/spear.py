"""Aligned chain ("spear"): energy in spacing variables and its minimiser.

With particles at 0 = x_0 < x_1 < ... < x_{N-1} on a line, all spins along
the line, the energy reduces to a sum of L over all pairs.  It is written in
the N-1 neighbour spacings h_k = x_k - x_{k-1}; a pair (i, j) depends on the
spacings it spans, so dJ/dh_k collects L' over every pair straddling gap k
and the Hessian entry (mu, nu) collects L'' over pairs straddling both.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy import linalg

from . import kernels
from .errors import ConvergenceError, DomainError
from .potential import (
    LJParams,
    alpha_dag,
    alpha_star,
    characteristic_distances,
    lj_value,
    zeta,
)

ARMIJO = 1e-4
SHRINK = 0.5
MAX_N = 4096


@dataclass(frozen=True)
class SpacingVector:
    h: np.ndarray

    def __post_init__(self):
        h = np.array(self.h, dtype=float).ravel()
        if h.size < 1:
            raise DomainError("a chain needs at least two particles")
        if np.any(~(h > 0)):
            raise DomainError("spacings must be strictly positive")
        h.setflags(write=False)
        object.__setattr__(self, "h", h)

    @property
    def n_particles(self):
        return self.h.size + 1

    def positions(self):
        return np.concatenate(([0.0], np.cumsum(self.h)))


@dataclass(frozen=True)
class HessianBounds:
    lambda_d: float
    lambda_nd: float
    lambda_1: float

    @property
    def positive(self):
        return self.lambda_d > 0 and self.lambda_1 > 0


@dataclass
class SpearSolution:
    spacing: SpacingVector
    energy: float
    grad_norm: float
    iterations: int
    certificate: HessianBounds | None
    box_respected: bool
    energy_history: list = field(default_factory=list)

    @property
    def h(self):
        return self.spacing.h


def _spacings(H):
    if isinstance(H, SpacingVector):
        return H.h
    return SpacingVector(H).h


def _args(p):
    return p.A, p.B, p.alpha, p.beta


def spear_energy(H, p: LJParams) -> float:
    return float(kernels.chain_energy(_spacings(H), *_args(p)))


def spear_gradient(H, p: LJParams) -> np.ndarray:
    return np.asarray(kernels.chain_gradient(_spacings(H), *_args(p)))


def spear_hessian(H, p: LJParams) -> np.ndarray:
    return np.asarray(kernels.chain_hessian(_spacings(H), *_args(p)))


def position_energy(P, p: LJParams) -> float:
    """Energy of collinear particles at arbitrary (distinct) coordinates P."""
    P = np.asarray(P, dtype=float)
    i, j = np.triu_indices(P.size, 1)
    return float(np.sum(lj_value(np.abs(P[i] - P[j]), p)))


def criticality_residual(H, p: LJParams) -> np.ndarray:
    """Componentwise residual of the first-order conditions (the gradient)."""
    return spear_gradient(H, p)


def hessian_bounds(p: LJParams) -> HessianBounds:
    ds = characteristic_distances(p)
    b, B = p.beta, p.B
    diag = b * B / ds.h_hat ** (b + 2) * (p.alpha - b)
    tail = b * (b + 1) * B / ds.h_check ** (b + 2)
    z1 = zeta(b + 1) - 1.0
    return HessianBounds(
        lambda_d=diag - tail * z1,
        lambda_nd=(b + 1) * B / ds.h_check ** (b + 2),
        lambda_1=diag - tail * (z1 + zeta(b) - 1.0),
    )


def row_dominance_gaps(hess):
    """|H_mm| - sum_{n != m} |H_mn| for every row."""
    a = np.abs(hess)
    d = np.diag(a)
    return d - (a.sum(axis=1) - d)


def _newton_direction(g, hess):
    try:
        c = linalg.cho_factor(hess, lower=True, check_finite=False)
        d = -linalg.cho_solve(c, g, check_finite=False)
    except linalg.LinAlgError:
        return None
    if not np.all(np.isfinite(d)) or g @ d >= 0:
        return None
    return d


def solve_spear(N: int, p: LJParams, tol: float = 1e-10, max_iter: int = 200, h0=None) -> SpearSolution:
    """Minimise the chain energy over spacings in [h_check, h_hat].

    Damped Newton with the exact Hessian from the constant start h_bar,
    iterates clamped to the box, Armijo backtracking on the energy, and a
    projected gradient step whenever the Newton direction is unusable.
    """
    N = int(N)
    if N < 2:
        raise DomainError("N must be at least 2")
    if N > MAX_N:
        raise DomainError(f"N={N} exceeds the dense-Hessian cap {MAX_N}")
    ds = characteristic_distances(p)
    lo, hi = ds.h_check, ds.h_hat
    H = np.full(N - 1, ds.h_bar) if h0 is None else np.clip(np.array(h0, dtype=float), lo, hi)
    J = spear_energy(H, p)
    g = spear_gradient(H, p)
    history = [J]
    eps = np.finfo(float).eps
    it = 0
    while np.max(np.abs(g)) > tol:
        if it >= max_iter:
            raise ConvergenceError(
                f"spear solver hit max_iter={max_iter} with residual {np.max(np.abs(g)):.3e}",
                last=H.copy(), residual=float(np.max(np.abs(g))),
            )
        it += 1
        d = _newton_direction(g, spear_hessian(H, p))
        newton = d is not None
        if not newton:
            d = -g
        t = 1.0
        accepted = False
        while t > 1e-14:
            Hn = np.clip(H + t * d, lo, hi)
            s = Hn - H
            if not np.any(s):
                break
            Jn = spear_energy(Hn, p)
            if Jn <= J + ARMIJO * (g @ s):
                accepted = True
                break
            if newton and t == 1.0:
                # at the round-off floor of J: take the full step if it
                # shrinks the residual and does not raise J beyond noise
                gn = spear_gradient(Hn, p)
                if Jn - J <= 64 * eps * max(1.0, abs(J)) and np.max(np.abs(gn)) < np.max(np.abs(g)):
                    accepted = True
                    break
            t *= SHRINK
        if not accepted:
            raise ConvergenceError(
                f"line search stalled at residual {np.max(np.abs(g)):.3e}",
                last=H.copy(), residual=float(np.max(np.abs(g))),
            )
        H, J = Hn, Jn
        g = spear_gradient(H, p)
        history.append(J)

    cert = hessian_bounds(p)
    return SpearSolution(
        spacing=SpacingVector(H),
        energy=J,
        grad_norm=float(np.max(np.abs(g))),
        iterations=it,
        certificate=cert if cert.positive else None,
        box_respected=bool(np.all((H >= lo) & (H <= hi))),
        energy_history=history,
    )


def refined_bounds(sol: SpearSolution, p: LJParams) -> dict:
    """Compare a solution with the bulk and end spacings h_bar, h_tilde.

    ``lower_scaled`` is (min h - h_bar) N**(beta-1) and ``upper_scaled``
    (max h - h_tilde) N**beta; over an N-sweep the first should stay
    bounded below by a positive constant and the second bounded above.
    """
    ds = characteristic_distances(p)
    h = sol.h
    N = sol.spacing.n_particles
    hyp = p.beta >= 3 and p.alpha > alpha_star(p.beta)
    lower = float(h.min() - ds.h_bar)
    upper = float(h.max() - ds.h_tilde)
    return {
        "N": N,
        "hypothesis": hyp,
        "min_h": float(h.min()),
        "max_h": float(h.max()),
        "lower_margin": lower,
        "upper_excess": upper,
        "lower_scaled": lower * N ** (p.beta - 1),
        "upper_scaled": upper * N ** p.beta,
        "lower_ok": lower > 0,
    }


def fit_refined_constants(reports):
    """Empirical c, C from a list of :func:`refined_bounds` reports."""
    c = min(r["lower_scaled"] for r in reports)
    C = max(max(r["upper_scaled"], 0.0) for r in reports)
    return c, C


def loglog_slope(x, y):
    x, y = np.asarray(x, float), np.asarray(y, float)
    return float(np.polyfit(np.log(x), np.log(y), 1)[0])


def asymptotic_report(p: LJParams, Ns, tol: float = 1e-10) -> dict:
    """Center, quarter and end spacings over an N-sweep, with log-log slopes."""
    Ns = [int(n) for n in Ns]
    if any(b <= a for a, b in zip(Ns, Ns[1:])):
        raise DomainError("Ns must be strictly increasing")
    ds = characteristic_distances(p)
    rows = []
    for N in Ns:
        h = solve_spear(N, p, tol=tol).h
        center = float(h[N // 2 - 1])
        quarter = float(h[max(N // 4, 1) - 1])
        rows.append({
            "N": N,
            "center": center,
            "boundary": float(h[0]),
            "quarter": quarter,
            "center_err": abs(center - ds.h_bar),
            "quarter_err": abs(quarter - ds.h_bar),
            "boundary_to_tilde": abs(h[0] - ds.h_tilde),
            "boundary_to_bar": abs(h[0] - ds.h_bar),
            "min_minus_bar": float(h.min() - ds.h_bar),
        })
    out = {"rows": rows, "h_bar": ds.h_bar, "h_tilde": ds.h_tilde,
           "hypothesis": p.beta >= 3 and p.alpha > alpha_star(p.beta)}
    if len(rows) >= 2:
        out["center_slope"] = loglog_slope(Ns, [r["center_err"] for r in rows])
        out["boundary_slope"] = loglog_slope(Ns, [r["boundary_to_tilde"] for r in rows])
    return out


def uniqueness_certified(p: LJParams) -> bool:
    return p.alpha > alpha_dag(p.beta)


__all__ = [
    "SpacingVector", "HessianBounds", "SpearSolution", "spear_energy", "spear_gradient",
    "spear_hessian", "position_energy", "criticality_residual", "hessian_bounds",
    "row_dominance_gaps", "solve_spear", "refined_bounds", "fit_refined_constants",
    "asymptotic_report", "loglog_slope", "uniqueness_certified",
]
