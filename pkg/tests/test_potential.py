import math

import mpmath
import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from magcolloid import potential as P
from magcolloid.errors import DomainError
from magcolloid.potential import LJParams

mpmath.mp.dps = 40


def test_lj_value_examples(lj_default):
    assert P.lj_value(1.0, lj_default) == 0.0
    assert P.lj_value(2.0, lj_default) == pytest.approx(2.0**-12 - 2.0**-3, abs=1e-15)
    assert P.lj_value(2.0, lj_default) == pytest.approx(-0.12475586, abs=1e-8)


@pytest.mark.parametrize("h", [0.0, -1.0])
def test_lj_rejects_nonpositive(lj_default, h):
    for f in (P.lj_value, P.lj_d1, P.lj_d2, P.lj_d3):
        with pytest.raises(DomainError):
            f(h, lj_default)


def test_params_validation():
    with pytest.raises(DomainError):
        LJParams(alpha=2.0, beta=3.0)
    with pytest.raises(DomainError):
        LJParams(beta=1.0)
    with pytest.raises(DomainError):
        LJParams(A=0.0)
    with pytest.raises(DomainError):
        LJParams(B0=float("nan"))


def test_derivative_zeros(lj_default):
    ds = P.characteristic_distances(lj_default)
    p = lj_default
    scale = p.alpha * p.A * ds.h_hat ** (-p.alpha - 1)
    assert abs(P.lj_d1(ds.h_hat, p)) < 1e-12 * scale
    scale2 = p.alpha * (p.alpha + 1) * p.A * ds.h_dag ** (-p.alpha - 2)
    assert abs(P.lj_d2(ds.h_dag, p)) < 1e-12 * scale2
    scale3 = p.alpha * (p.alpha + 1) * (p.alpha + 2) * p.A * ds.h_ddag ** (-p.alpha - 3)
    assert abs(P.lj_d3(ds.h_ddag, p)) < 1e-10 * scale3
    # sign change of L''' across h_ddag
    assert P.lj_d3(ds.h_ddag * 0.99, p) * P.lj_d3(ds.h_ddag * 1.01, p) < 0


def test_lj_d1_finite_difference(lj_default):
    h, eps = 1.1, 1e-6
    fd = (P.lj_value(h + eps, lj_default) - P.lj_value(h - eps, lj_default)) / (2 * eps)
    assert abs(fd - P.lj_d1(h, lj_default)) < 1e-7 * abs(fd)


def test_derivatives_on_grid(lj_default):
    ds = P.characteristic_distances(lj_default)
    hs = np.linspace(0.5 * ds.h_check, 3 * ds.h_hat, 200)
    eps = 1e-6 * hs
    d1 = P.lj_d1(hs, lj_default)
    fd1 = (P.lj_value(hs + eps, lj_default) - P.lj_value(hs - eps, lj_default)) / (2 * eps)
    fd2 = (P.lj_d1(hs + eps, lj_default) - P.lj_d1(hs - eps, lj_default)) / (2 * eps)
    # relative to the size of each term, since both derivatives cross zero on the grid
    s1 = lj_default.alpha * hs ** (-lj_default.alpha - 1) + lj_default.beta * hs ** (-lj_default.beta - 1)
    s2 = 13 * 12 * hs**-14.0 + 12 * hs**-5.0
    assert np.all(np.abs(fd1 - d1) <= 1e-6 * s1)
    assert np.all(np.abs(fd2 - P.lj_d2(hs, lj_default)) <= 1e-6 * s2)


def test_zeta_known_values():
    assert P.zeta(2) == pytest.approx(math.pi**2 / 6, abs=1e-10)
    assert P.zeta(3) == pytest.approx(1.2020569032, abs=1e-10)
    assert P.zeta(12) == pytest.approx(1.0002460866, abs=1e-10)


@pytest.mark.parametrize("s", [1.1, 1.5, 2.0, 2.5, 3.0, 4.0, 6.0, 8.0, 12.0, 37.0, 60.0])
def test_zeta_against_mpmath(s):
    assert abs(P.zeta(s) - float(mpmath.zeta(s))) < 1e-12
    assert abs(P.zeta_minus_one(s) - float(mpmath.zeta(s) - 1)) <= 1e-11 * float(mpmath.zeta(s) - 1)


def test_zeta_domain():
    with pytest.raises(DomainError):
        P.zeta(1.0)
    with pytest.raises(DomainError):
        P.zeta(2.0, tol=0.0)


def test_h_hat_example(lj_default):
    ds = P.characteristic_distances(lj_default)
    assert ds.h_hat == pytest.approx(4.0 ** (1 / 9), rel=1e-14)
    assert ds.h_hat == pytest.approx(1.16653, abs=1e-5)


def test_lattice_zeros(lj_default):
    ds = P.characteristic_distances(lj_default)
    p = lj_default
    scale = p.beta * p.B * P.zeta(p.beta + 1) * ds.h_tilde ** (-p.beta - 1)
    assert abs(P.lattice_sharp(ds.h_tilde, p)) < 1e-10 * scale
    scale = p.beta * p.B * P.zeta(p.beta) * ds.h_bar ** (-p.beta - 1)
    assert abs(P.lattice_flat(ds.h_bar, p)) < 1e-10 * scale


@pytest.mark.parametrize("alpha", [3.5, 6.0, 12.0, 36.0])
def test_sharp_flat_beyond_hat_for_beta_ge_3(alpha):
    ds = P.characteristic_distances(LJParams(alpha=alpha, beta=3.0))
    assert ds.h_sharp > ds.h_hat and ds.h_flat > ds.h_hat


def test_zeta_products_increasing():
    x = np.arange(3.0, 20.0 + 1e-9, 0.1)
    z = np.array([P.zeta(s) for s in x])
    assert np.all(np.diff((x + 1) * z) > 0)
    assert np.all(np.diff(x * z) > 0)


@settings(max_examples=150, deadline=None)
@given(beta=st.floats(1.2, 10.0), gap=st.floats(0.05, 80.0),
       A=st.floats(0.1, 10.0), B=st.floats(0.1, 10.0))
def test_distance_ordering_property(beta, gap, A, B):
    p = LJParams(A=A, B=B, alpha=beta + gap, beta=beta)
    ds = P.characteristic_distances(p)
    g1, g2, g3 = P.distance_log_gaps(p)
    assert g1 > 0 and g2 > 0 and g3 > 0
    assert ds.h_check <= ds.h_bar < ds.h_tilde < ds.h_hat


def test_log_gaps_match_distances(lj_default):
    ds = P.characteristic_distances(lj_default)
    g1, g2, g3 = P.distance_log_gaps(lj_default)
    assert g1 == pytest.approx(math.log(ds.h_bar / ds.h_check), rel=1e-6)
    assert g2 == pytest.approx(math.log(ds.h_tilde / ds.h_bar), rel=1e-9)
    assert g3 == pytest.approx(math.log(ds.h_hat / ds.h_tilde), rel=1e-9)


@pytest.mark.parametrize("beta", [3.0, 6.0])
def test_threshold_root_residuals(beta):
    a = P.alpha_dag(beta)
    assert abs(P.F_beta(a, beta)) < 1e-8
    s = P.alpha_star(beta)
    assert abs(P.G_beta(s, beta)) < 1e-8


@pytest.mark.parametrize("beta", [2.5, 3.0, 4.0, 6.0])
def test_alpha_star_above_alpha_dag(beta):
    assert P.alpha_star(beta) >= P.alpha_dag(beta)


def test_thresholds_positive_past_root():
    for beta in (3.0, 6.0):
        a = P.alpha_dag(beta)
        s = P.alpha_star(beta)
        for x in np.geomspace(1.001, 1000, 30):
            assert P.F_beta(a * x, beta) > 0
            assert P.G_beta(s * x, beta) > 0
