"""Entrywise decay of inverses of diagonally dominant matrices.

For a square M with |M_ii| >= d and |M_ij| <= c / |i - j|**gamma, set

    delta = 2 (1 + 2**gamma) zeta(gamma)
    r_+   = (c/d) (delta + sqrt(delta**2 + 8 zeta(2 gamma))) / 2.

If r_+ < 1 then M is invertible and, with kappa = 1/(1 - r_+),

    |inv(M)_ij| <= kappa c / (d**2 |i - j|**gamma)          (i != j)
    |inv(M)_ii| <= 1/d + zeta(2 gamma) kappa c**2 / d**3.

The proof runs through the Neumann series of B = I - D^-1 M, whose powers
obey |(B^k)_ij| <= c r_+**(k-1) / (d |i-j|**gamma) off the diagonal and
|(B^k)_ii| <= 2 zeta(2 gamma) (c/d)**2 r_+**(k-2) on it.
"""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field

import numpy as np
from scipy import linalg

from .errors import DomainError, HypothesisError
from .potential import LJParams, characteristic_distances, zeta

MAX_N = 1000
SLACK = 1e-12  # relative, for floating-point comparisons against the bounds


@dataclass(frozen=True)
class DecayMatrixSpec:
    gamma: float
    c: float
    d: float
    delta: float = field(init=False)
    r_plus: float = field(init=False)
    kappa: float = field(init=False)

    def __post_init__(self):
        if not self.gamma > 1:
            raise DomainError("gamma must exceed 1")
        if self.c < 0 or not self.d > 0:
            raise DomainError("need c >= 0 and d > 0")
        g = float(self.gamma)
        delta = 2.0 * (1.0 + 2.0**g) * zeta(g)
        r = (self.c / self.d) * (delta + math.sqrt(delta**2 + 8.0 * zeta(2.0 * g))) / 2.0
        object.__setattr__(self, "delta", delta)
        object.__setattr__(self, "r_plus", r)
        object.__setattr__(self, "kappa", 1.0 / (1.0 - r) if r < 1 else math.inf)

    @property
    def contracting(self):
        return self.r_plus < 1

    def as_dict(self):
        return {"gamma": self.gamma, "c": self.c, "d": self.d, "delta": self.delta,
                "r_plus": self.r_plus, "kappa": self.kappa}


def _square(M):
    M = np.asarray(M)
    if M.ndim != 2 or M.shape[0] != M.shape[1]:
        raise DomainError("matrix must be square")
    if M.shape[0] > MAX_N:
        raise DomainError(f"N={M.shape[0]} exceeds cap {MAX_N}")
    return M


def _distance(n):
    i = np.arange(n)
    return np.abs(i[:, None] - i[None, :]).astype(float)


def _worst(ratio):
    idx = np.unravel_index(int(np.argmax(ratio)), ratio.shape)
    return [int(idx[0]), int(idx[1])], float(ratio[idx])


def verify_hypotheses(M, spec: DecayMatrixSpec) -> dict:
    """Check dominance, off-diagonal decay, diagonal floor and r_+ < 1.

    Each entry carries ``ok`` plus the worst offender and its value.
    """
    M = _square(M)
    n = M.shape[0]
    a = np.abs(M)
    diag = np.diag(a).copy()
    off = a.sum(axis=1) - diag
    gap = diag - off
    out = {}
    i = int(np.argmin(gap)) if n else 0
    out["diagonally_dominant"] = {"ok": bool(np.all(gap > 0)), "worst": [i, i],
                                  "value": float(gap[i]) if n else math.inf}
    dist = _distance(n)
    np.fill_diagonal(dist, 1.0)
    allowed = spec.c / dist**spec.gamma
    np.fill_diagonal(allowed, np.inf)
    with np.errstate(divide="ignore", invalid="ignore"):
        ratio = np.where(a == 0, 0.0, a / allowed)
    np.fill_diagonal(ratio, 0.0)
    w, val = _worst(ratio) if n > 1 else ([0, 0], 0.0)
    out["off_diagonal_decay"] = {"ok": bool(val <= 1 + SLACK), "worst": w, "value": val}
    j = int(np.argmin(diag)) if n else 0
    out["diagonal_floor"] = {"ok": bool(np.all(diag >= spec.d * (1 - SLACK))), "worst": [j, j],
                             "value": float(diag[j]) if n else math.inf}
    out["r_plus_below_one"] = {"ok": bool(spec.contracting), "worst": None, "value": spec.r_plus}
    out["all"] = all(v["ok"] for v in out.values())
    return out


def decay_bound(spec: DecayMatrixSpec, i: int, j: int) -> float:
    if not spec.contracting:
        raise HypothesisError(f"r_+ = {spec.r_plus:.6g} >= 1; no decay bound")
    if i == j:
        return 1.0 / spec.d + zeta(2 * spec.gamma) * spec.kappa * spec.c**2 / spec.d**3
    return spec.kappa * spec.c / (spec.d**2 * abs(i - j) ** spec.gamma)


def decay_bound_matrix(spec: DecayMatrixSpec, n: int) -> np.ndarray:
    if not spec.contracting:
        raise HypothesisError(f"r_+ = {spec.r_plus:.6g} >= 1; no decay bound")
    dist = _distance(n)
    np.fill_diagonal(dist, 1.0)
    out = spec.kappa * spec.c / (spec.d**2 * dist**spec.gamma)
    np.fill_diagonal(out, decay_bound(spec, 0, 0))
    return out


def check_inverse_decay(M, spec: DecayMatrixSpec) -> dict:
    """Invert M by pivoted LU and compare every entry with its bound."""
    M = _square(M)
    n = M.shape[0]
    hyp = verify_hypotheses(M, spec)
    report = {"hypotheses": hyp, "r_plus": spec.r_plus, "kappa": spec.kappa,
              "max_ratio": None, "within": False, "counterexample": None}
    if not spec.contracting:
        return report
    bound = decay_bound_matrix(spec, n)
    try:
        with warnings.catch_warnings():
            warnings.simplefilter("error", linalg.LinAlgWarning)
            lu = linalg.lu_factor(M, check_finite=True)
        with np.errstate(all="ignore"):
            inv = linalg.lu_solve(lu, np.eye(n, dtype=np.result_type(M, float)))
        if not np.all(np.isfinite(inv)):
            raise linalg.LinAlgError("non-finite inverse")
    except (linalg.LinAlgError, linalg.LinAlgWarning, ValueError) as exc:
        report["counterexample"] = {"kind": "singular", "message": str(exc)}
        return report
    a = np.abs(inv)
    with np.errstate(divide="ignore", invalid="ignore"):
        ratio = np.where(a == 0, 0.0, a / bound)
    w, val = _worst(ratio)
    report["max_ratio"] = val
    report["max_ratio_offdiag"] = float(np.max(ratio - np.diag(np.diag(ratio)))) if n > 1 else 0.0
    report["within"] = bool(val <= 1 + SLACK)
    if not report["within"]:
        report["counterexample"] = {"kind": "bound_exceeded", "entry": w, "ratio": val}
    return report


def neumann_coefficients(M, spec: DecayMatrixSpec, k_max: int = 8) -> dict:
    """Powers of B = I - D^-1 M against their entrywise bounds, k = 1..k_max."""
    M = _square(M)
    n = M.shape[0]
    D = np.diag(M)
    Bm = np.eye(n) - M / D[:, None]
    np.fill_diagonal(Bm, 0.0)  # exact zero, not a rounded 1 - 1
    dist = _distance(n)
    np.fill_diagonal(dist, 1.0)
    c, d, r = spec.c, spec.d, spec.r_plus
    z2 = zeta(2 * spec.gamma)
    rows = []
    P = np.eye(n, dtype=Bm.dtype)
    for k in range(1, k_max + 1):
        P = P @ Bm
        a = np.abs(P)
        off_bound = c * r ** (k - 1) / (d * dist**spec.gamma)
        with np.errstate(divide="ignore", invalid="ignore"):
            off_ratio = np.where(a == 0, 0.0, a / off_bound)
        np.fill_diagonal(off_ratio, 0.0)
        dg = np.diag(a)
        if k == 1:
            diag_ok = bool(np.all(dg == 0))
            diag_ratio = 0.0 if diag_ok else math.inf
        else:
            db = 2 * z2 * (c / d) ** 2 * r ** (k - 2)
            diag_ratio = float(np.max(dg) / db) if db > 0 else (0.0 if not np.any(dg) else math.inf)
            diag_ok = diag_ratio <= 1 + SLACK
        off_max = float(np.max(off_ratio)) if n > 1 else 0.0
        rows.append({"k": k, "offdiag_max_ratio": off_max, "diag_max_ratio": diag_ratio,
                     "ok": bool(off_max <= 1 + SLACK and diag_ok)})
    return {"rows": rows, "all": all(r["ok"] for r in rows)}


def shifted_sum_check(n: int, gamma: float) -> dict:
    """sum_{k != i,j} |i-k|**-g |k-j|**-g <= delta / |i-j|**g for all i != j < n."""
    W = _distance(n)
    np.fill_diagonal(W, np.inf)
    W = W**-gamma
    S = W @ W  # zero diagonal of W drops k = i and k = j
    dist = _distance(n)
    np.fill_diagonal(dist, 1.0)
    delta = 2.0 * (1.0 + 2.0**gamma) * zeta(gamma)
    ratio = S * dist**gamma / delta
    np.fill_diagonal(ratio, 0.0)
    w, val = _worst(ratio)
    return {"n": n, "gamma": gamma, "delta": delta, "max_ratio": val, "worst": w, "ok": bool(val <= 1)}


def random_decay_matrix(spec: DecayMatrixSpec, n: int, rng, complex_entries: bool = False):
    """A random matrix meeting the entrywise hypotheses of ``spec``.

    Off-diagonal moduli are uniform in [0, c/|i-j|**gamma], diagonal moduli in
    [d, 2d]; phases (signs for real matrices) are random.
    """
    dist = _distance(n)
    np.fill_diagonal(dist, 1.0)
    mod = rng.uniform(0.0, 1.0, (n, n)) * spec.c / dist**spec.gamma
    np.fill_diagonal(mod, spec.d * rng.uniform(1.0, 2.0, n))
    if complex_entries:
        return mod * np.exp(2j * np.pi * rng.uniform(size=(n, n)))
    return mod * rng.choice([-1.0, 1.0], size=(n, n))


def spear_hessian_spec(p: LJParams, gamma: float | None = None) -> DecayMatrixSpec:
    """Spec for the chain Hessian rescaled by 1/Lambda_d.

    The off-diagonal entries decay like |mu - nu|**-beta, so gamma defaults
    to beta, with c = Lambda_nd / Lambda_d and d = 1.
    """
    from .spear import hessian_bounds

    hb = hessian_bounds(p)
    return DecayMatrixSpec(gamma=p.beta if gamma is None else gamma, c=hb.lambda_nd / hb.lambda_d, d=1.0)


def spear_hessian_check(p: LJParams, N: int, gamma: float | None = None) -> dict:
    """Inverse-decay report for the chain Hessian at the constant spacing h_bar."""
    from .spear import hessian_bounds, spear_hessian

    hb = hessian_bounds(p)
    H = np.full(N - 1, characteristic_distances(p).h_bar)
    M = spear_hessian(H, p) / hb.lambda_d
    return check_inverse_decay(M, spear_hessian_spec(p, gamma))


__all__ = [
    "DecayMatrixSpec", "verify_hypotheses", "decay_bound", "decay_bound_matrix",
    "check_inverse_decay", "neumann_coefficients", "shifted_sum_check",
    "random_decay_matrix", "spear_hessian_spec", "spear_hessian_check",
]
