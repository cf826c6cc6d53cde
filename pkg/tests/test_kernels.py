import os
import subprocess
import sys

import numpy as np
import pytest

from magcolloid import kernels
from magcolloid.potential import LJParams, characteristic_distances


@pytest.fixture
def chain():
    p = LJParams(alpha=36.0)
    ds = characteristic_distances(p)
    h = np.random.default_rng(0).uniform(ds.h_check, ds.h_hat, 40)
    return h, (p.A, p.B, p.alpha, p.beta)


def test_chain_kernels_agree(chain):
    h, args = chain
    e1, e2 = kernels.chain_energy_nb(h, *args), kernels.chain_energy_np(h, *args)
    assert e1 == pytest.approx(e2, rel=1e-13)
    assert np.allclose(kernels.chain_gradient_nb(h, *args), kernels.chain_gradient_np(h, *args), rtol=1e-11, atol=1e-12)
    assert np.allclose(kernels.chain_hessian_nb(h, *args), kernels.chain_hessian_np(h, *args), rtol=1e-11, atol=1e-11)


def test_ring_sums_agree():
    for n in (2, 5, 64, 1000):
        a = kernels.ring_sums_nb(n, 1.0, 2.0, 0.5, 12.0, 3.0)
        b = kernels.ring_sums_np(n, 1.0, 2.0, 0.5, 12.0, 3.0)
        assert np.allclose(a, b, rtol=1e-14)


def test_pair_and_advance_agree():
    rng = np.random.default_rng(1)
    x = rng.normal(size=(7, 3)) * 2
    m = rng.normal(size=(7, 3))
    m /= np.linalg.norm(m, axis=1)[:, None]
    args = (0.5, 2.0, 1.0, 12.0, 3.0)
    U1, gx1, gm1 = kernels.pair_gradients_nb(x, m, *args)
    U2, gx2, gm2 = kernels.pair_gradients_np(x, m, *args)
    assert U1 == pytest.approx(U2, rel=1e-13)
    assert np.allclose(gx1, gx2, atol=1e-13) and np.allclose(gm1, gm2, atol=1e-13)
    states = []
    for fn in (kernels.advance_nb, kernels.advance_np):
        xs, ms, v, w = x.copy(), m.copy(), np.zeros_like(x), np.zeros_like(x)
        assert fn(xs, ms, v, w, 100, 1e-3, *args, 20.0, 2.0, 0.94, 0.63, 1e-4) == (100, 0)
        states.append((xs, ms))
    assert np.allclose(states[0][0], states[1][0], atol=1e-11)
    assert np.allclose(states[0][1], states[1][1], atol=1e-11)


def test_env_flag_selects_fallback():
    code = ("from magcolloid import kernels, _accel; "
            "print(_accel.USE_NUMBA, kernels.chain_energy is kernels.chain_energy_np)")
    env = dict(os.environ, MAGCOLLOID_NUMBA="0")
    out = subprocess.run([sys.executable, "-c", code], env=env, capture_output=True, text=True, check=True)
    assert out.stdout.split() == ["False", "True"]
