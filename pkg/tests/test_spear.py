import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy import optimize

from magcolloid import spear as S
from magcolloid.errors import ConvergenceError, DomainError
from magcolloid.potential import LJParams, characteristic_distances, lj_d1, lj_value


def brute_gradient(h, p):
    """dJ/dh_k summed pair by pair from positions (independent of the kernels)."""
    x = np.concatenate(([0.0], np.cumsum(h)))
    n = x.size
    g = np.zeros(n - 1)
    for i in range(n):
        for j in range(i + 1, n):
            g[i:j] += lj_d1(x[j] - x[i], p)
    return g


def coordinate_descent(h, p, lo, hi, sweeps=500):
    h = np.array(h, dtype=float)
    for _ in range(sweeps):
        old = h.copy()
        for k in range(h.size):
            def gk(t, k=k):
                hh = h.copy()
                hh[k] = t
                return brute_gradient(hh, p)[k]
            a, b = gk(lo), gk(hi)
            if a >= 0:
                h[k] = lo
            elif b <= 0:
                h[k] = hi
            else:
                h[k] = optimize.brentq(gk, lo, hi, xtol=1e-15, rtol=1e-15)
        if np.max(np.abs(h - old)) < 1e-13:
            break
    return h


def test_spacing_vector_validation():
    with pytest.raises(DomainError):
        S.SpacingVector([])
    with pytest.raises(DomainError):
        S.SpacingVector([1.0, 0.0])
    sv = S.SpacingVector([1.0, 2.0])
    assert sv.n_particles == 3
    assert np.array_equal(sv.positions(), [0.0, 1.0, 3.0])
    with pytest.raises(ValueError):
        sv.h[0] = 5.0


def test_energy_small_cases(lj_default):
    ds = characteristic_distances(lj_default)
    assert S.spear_energy([ds.h_hat], lj_default) == pytest.approx(lj_value(ds.h_hat, lj_default), rel=1e-15)
    assert S.spear_energy([1.0, 1.0], lj_default) == pytest.approx(-0.12475586, abs=1e-8)
    with pytest.raises(DomainError):
        S.spear_energy([1.0, -1.0], lj_default)


def test_energy_matches_positions(lj_default):
    rng = np.random.default_rng(1)
    for n in range(2, 9):
        P = np.sort(rng.uniform(0, 8, n))
        assert abs(S.spear_energy(np.diff(P), lj_default) - S.position_energy(P, lj_default)) < 1e-12


def test_gradient_examples(lj_default, lj36):
    ds = characteristic_distances(lj_default)
    assert abs(S.spear_gradient([ds.h_hat], lj_default)[0]) < 1e-12
    rng = np.random.default_rng(2)
    d36 = characteristic_distances(lj36)
    H = rng.uniform(d36.h_check, d36.h_hat, 9)
    g = S.spear_gradient(H, lj36)
    eps = 1e-6
    fd = np.array([(S.spear_energy(H + eps * e, lj36) - S.spear_energy(H - eps * e, lj36)) / (2 * eps)
                   for e in np.eye(9)])
    assert np.max(np.abs(fd - g)) < 1e-6 * np.max(np.abs(g))
    assert np.allclose(g, brute_gradient(H, lj36), rtol=1e-12, atol=1e-12)


@pytest.mark.parametrize("N", [8, 32])
def test_gradient_nonpositive_at_bulk_spacing(lj36, N):
    ds = characteristic_distances(lj36)
    assert np.all(S.spear_gradient(np.full(N - 1, ds.h_bar), lj36) <= 0)


def test_hessian(lj_default, lj36):
    assert S.spear_hessian([1.1], lj_default).shape == (1, 1)
    from magcolloid.potential import lj_d2
    assert S.spear_hessian([1.1], lj_default)[0, 0] == pytest.approx(lj_d2(1.1, lj_default), rel=1e-14)
    rng = np.random.default_rng(3)
    ds = characteristic_distances(lj36)
    H = rng.uniform(ds.h_check, ds.h_hat, 7)
    Hs = S.spear_hessian(H, lj36)
    assert np.allclose(Hs, Hs.T)
    eps = 1e-6
    fd = np.array([(S.spear_gradient(H + eps * e, lj36) - S.spear_gradient(H - eps * e, lj36)) / (2 * eps)
                   for e in np.eye(7)])
    assert np.max(np.abs(fd - Hs)) < 1e-5 * np.max(np.abs(Hs))
    off = Hs - np.diag(np.diag(Hs))
    assert np.all(off <= 0)


def test_hessian_bounds_sign():
    assert S.hessian_bounds(LJParams(alpha=36.0)).lambda_1 > 0
    hb = S.hessian_bounds(LJParams(alpha=3.1))
    assert hb.lambda_1 < 0 and not hb.positive


def test_row_dominance_and_eigen(lj36):
    hb = S.hessian_bounds(lj36)
    ds = characteristic_distances(lj36)
    rng = np.random.default_rng(4)
    for N in (2, 8, 33, 64):
        H = rng.uniform(ds.h_check, ds.h_hat, N - 1)
        M = S.spear_hessian(H, lj36)
        assert np.min(S.row_dominance_gaps(M)) >= hb.lambda_1 - 1e-9
        assert np.linalg.eigvalsh(M)[0] >= hb.lambda_1 - 1e-9


def test_solve_two_particles(lj_default):
    sol = S.solve_spear(2, lj_default)
    assert sol.h[0] == pytest.approx(characteristic_distances(lj_default).h_hat, abs=1e-10)


def test_solve_sixteen(lj36):
    sol = S.solve_spear(16, lj36)
    ds = characteristic_distances(lj36)
    assert sol.grad_norm <= 1e-10
    assert np.max(np.abs(S.criticality_residual(sol.spacing, lj36))) <= 1e-10
    assert np.all((sol.h >= ds.h_check) & (sol.h <= ds.h_hat)) and sol.box_respected
    assert np.max(np.abs(sol.h - sol.h[::-1])) < 1e-8
    assert sol.certificate is not None
    hist = np.array(sol.energy_history)
    assert np.all(np.diff(hist) <= 64 * np.finfo(float).eps * np.abs(hist[1:]))


def test_solve_matches_coordinate_descent(lj36):
    ds = characteristic_distances(lj36)
    sol = S.solve_spear(16, lj36)
    rng = np.random.default_rng(5)
    for _ in range(5):
        h0 = rng.uniform(ds.h_check, ds.h_hat, 15)
        ref = coordinate_descent(h0, lj36, ds.h_check, ds.h_hat)
        assert np.max(np.abs(ref - sol.h)) < 1e-8


def test_solver_reports_failure(lj36):
    with pytest.raises(ConvergenceError) as exc:
        S.solve_spear(32, lj36, tol=1e-10, max_iter=1)
    assert exc.value.last is not None and exc.value.residual > 1e-10
    with pytest.raises(DomainError):
        S.solve_spear(1, lj36)


def test_no_certificate_below_threshold():
    sol = S.solve_spear(8, LJParams(alpha=3.2, beta=3.0))
    assert sol.certificate is None


def test_refined_bounds(lj36):
    ds = characteristic_distances(lj36)
    rep = S.refined_bounds(S.solve_spear(64, lj36), lj36)
    assert rep["hypothesis"] and rep["lower_ok"]
    assert rep["max_h"] < ds.h_tilde + 0.5 * (ds.h_hat - ds.h_tilde)
    reports = [S.refined_bounds(S.solve_spear(N, lj36), lj36) for N in (16, 32, 64, 128)]
    c, C = S.fit_refined_constants(reports)
    assert c > 0 and C >= 0


def test_refined_bounds_flags_hypothesis():
    p = LJParams(alpha=12.0, beta=3.0)
    assert not S.refined_bounds(S.solve_spear(16, p), p)["hypothesis"]


def test_asymptotic_report_shape(lj36):
    rep = S.asymptotic_report(lj36, [16, 32, 64])
    assert [r["N"] for r in rep["rows"]] == [16, 32, 64]
    assert rep["center_slope"] < 0
    with pytest.raises(DomainError):
        S.asymptotic_report(lj36, [32, 16])


@settings(max_examples=60, deadline=None)
@given(st.lists(st.floats(0.6, 2.5), min_size=1, max_size=20))
def test_reversal_invariance(h):
    p = LJParams(alpha=36.0)
    assert S.spear_energy(h, p) == pytest.approx(S.spear_energy(h[::-1], p), rel=1e-12, abs=1e-12)


@settings(max_examples=80, deadline=None)
@given(st.data())
def test_box_property(data):
    p = LJParams(alpha=36.0)
    ds = characteristic_distances(p)
    n = data.draw(st.integers(2, 24))
    H = np.array(data.draw(st.lists(st.floats(ds.h_check, 1.6), min_size=n, max_size=n)))
    k = data.draw(st.integers(0, n - 1))
    above = H.copy()
    above[k] = data.draw(st.floats(ds.h_hat * (1 + 1e-6), 3.0))
    assert S.spear_gradient(above, p)[k] > 0
    below = np.clip(H, ds.h_check, None)
    below[k] = data.draw(st.floats(0.7, ds.h_check * (1 - 1e-6)))
    j = int(np.argmin(below))
    assert S.spear_gradient(below, p)[j] < 0


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 2**31 - 1), st.integers(2, 40))
def test_strong_convexity_on_box(seed, N):
    p = LJParams(alpha=36.0)
    ds = characteristic_distances(p)
    H = np.random.default_rng(seed).uniform(ds.h_check, ds.h_hat, N - 1)
    assert np.linalg.eigvalsh(S.spear_hessian(H, p))[0] >= S.hessian_bounds(p).lambda_1 - 1e-9
