"""Time the numba kernels against their numpy fallbacks.

    python3 benchmarks/bench_kernels.py [--repeat 5]

Both variants are always importable from ``magcolloid.kernels``; the
MAGCOLLOID_NUMBA env flag only decides which one the package binds.
"""
import argparse
import timeit

import numpy as np

from magcolloid import kernels
from magcolloid._accel import HAVE_NUMBA
from magcolloid.potential import LJParams, characteristic_distances


def cases():
    p = LJParams(alpha=36.0, beta=3.0)
    h = np.full(255, characteristic_distances(p).h_bar)
    args = (h, p.A, p.B, p.alpha, p.beta)
    rng = np.random.default_rng(0)
    n = 12
    x = rng.normal(size=(n, 3)) * 3.0
    m = rng.normal(size=(n, 3))
    m /= np.linalg.norm(m, axis=1)[:, None]
    q = LJParams(A=0.5, B=2.0, B0=1.0)
    pair = (x, m, q.A, q.B, q.B0, q.alpha, q.beta)

    def adv(fn):
        def go():
            xs, ms = x.copy(), m.copy()
            fn(xs, ms, np.zeros_like(x), np.zeros_like(x), 200, 1e-3,
               q.A, q.B, q.B0, q.alpha, q.beta, 20.0, 2.0, 0.94, 0.63, 1e-4)
        return go

    yield "chain_energy N=256", lambda: kernels.chain_energy_nb(*args), lambda: kernels.chain_energy_np(*args)
    yield "chain_gradient N=256", lambda: kernels.chain_gradient_nb(*args), lambda: kernels.chain_gradient_np(*args)
    yield "chain_hessian N=256", lambda: kernels.chain_hessian_nb(*args), lambda: kernels.chain_hessian_np(*args)
    yield "ring_sums N=4096", (lambda: kernels.ring_sums_nb(4096, 1.0, 1.0, 1.0, 12.0, 3.0)), \
        (lambda: kernels.ring_sums_np(4096, 1.0, 1.0, 1.0, 12.0, 3.0))
    yield "pair_gradients N=12", lambda: kernels.pair_gradients_nb(*pair), lambda: kernels.pair_gradients_np(*pair)
    yield "advance N=12 x200", adv(kernels.advance_nb), adv(kernels.advance_np)


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args()
    print(f"numba available: {HAVE_NUMBA}")
    print(f"{'kernel':<24}{'numba [ms]':>12}{'numpy [ms]':>12}{'speedup':>10}")
    for name, fast, slow in cases():
        fast()  # compile
        tf = min(timeit.repeat(fast, number=1, repeat=args.repeat)) * 1e3
        ts = min(timeit.repeat(slow, number=1, repeat=args.repeat)) * 1e3
        print(f"{name:<24}{tf:>12.3f}{ts:>12.3f}{ts / tf:>10.1f}")


if __name__ == "__main__":
    main()
