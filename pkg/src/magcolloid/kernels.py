"""Hot loops, each in a numba flavour (``*_nb``) and a numpy flavour (``*_np``).

The public names without suffix are bound to one of the two at import time
(see :mod:`magcolloid._accel`).  Model constants are passed as plain floats
so the compiled kernels never see Python objects.
"""
import math

import numpy as np

from ._accel import njit, pick

# ---------------------------------------------------------------------------
# chain (spacing) functional


@njit
def _L(d, A, B, a, b):
    return A * d ** -a - B * d ** -b


@njit
def _L1(d, A, B, a, b):
    return -a * A * d ** (-a - 1.0) + b * B * d ** (-b - 1.0)


@njit
def _L2(d, A, B, a, b):
    return a * (a + 1.0) * A * d ** (-a - 2.0) - b * (b + 1.0) * B * d ** (-b - 2.0)


@njit
def chain_energy_nb(h, A, B, a, b):
    n = h.shape[0] + 1
    total = 0.0
    for i in range(n - 1):
        d = 0.0
        for j in range(i + 1, n):
            d += h[j - 1]
            total += _L(d, A, B, a, b)
    return total


@njit
def chain_gradient_nb(h, A, B, a, b):
    # g[k] = sum over pairs (i, j), i <= k < j, of L'(x_j - x_i)
    n = h.shape[0] + 1
    g = np.zeros(n - 1)
    for i in range(n - 1):
        d = 0.0
        for j in range(i + 1, n):
            d += h[j - 1]
        # walk j downwards keeping the suffix sum over partners >= j
        s = 0.0
        for j in range(n - 1, i, -1):
            s += _L1(d, A, B, a, b)
            g[j - 1] += s
            d -= h[j - 1]
    return g


@njit
def chain_hessian_nb(h, A, B, a, b):
    # H[m, q] (m <= q) = sum over pairs i <= m < q < j of L''(x_j - x_i)
    n = h.shape[0] + 1
    m = n - 1
    H = np.zeros((m, m))
    col = np.zeros(m)
    for i in range(n - 1):
        d = 0.0
        for j in range(i + 1, n):
            d += h[j - 1]
        s = 0.0
        for j in range(n - 1, i, -1):
            s += _L2(d, A, B, a, b)
            col[j - 1] += s
            d -= h[j - 1]
        for q in range(i, m):
            H[i, q] = col[q]
            H[q, i] = col[q]
    return H


def _pair_distances(h):
    x = np.concatenate(([0.0], np.cumsum(h)))
    return x[None, :] - x[:, None]


def chain_energy_np(h, A, B, a, b):
    D = _pair_distances(h)
    iu = np.triu_indices(D.shape[0], 1)
    d = D[iu]
    return float(np.sum(A * d ** -a - B * d ** -b))


def _crossing_sums(M):
    # C[k, c] = sum_{i <= k} sum_{j >= c} M[i, j]
    R = np.cumsum(M[:, ::-1], axis=1)[:, ::-1]
    return np.cumsum(R, axis=0)


def _upper(h, f):
    D = _pair_distances(h)
    n = D.shape[0]
    M = np.zeros_like(D)
    iu = np.triu_indices(n, 1)
    M[iu] = f(D[iu])
    return M


def chain_gradient_np(h, A, B, a, b):
    M = _upper(h, lambda d: -a * A * d ** (-a - 1.0) + b * B * d ** (-b - 1.0))
    C = _crossing_sums(M)
    k = np.arange(M.shape[0] - 1)
    return C[k, k + 1]


def chain_hessian_np(h, A, B, a, b):
    M = _upper(h, lambda d: a * (a + 1.0) * A * d ** (-a - 2.0) - b * (b + 1.0) * B * d ** (-b - 2.0))
    C = _crossing_sums(M)
    m = M.shape[0] - 1
    mu, nu = np.meshgrid(np.arange(m), np.arange(m), indexing="ij")
    lo, hi = np.minimum(mu, nu), np.maximum(mu, nu)
    return C[lo, hi + 1]


chain_energy = pick(chain_energy_nb, chain_energy_np)
chain_gradient = pick(chain_gradient_nb, chain_gradient_np)
chain_hessian = pick(chain_hessian_nb, chain_hessian_np)

# ---------------------------------------------------------------------------
# ring lattice sums


@njit
def ring_sums_nb(n, A, B, B0, a, b):
    # Neumaier-compensated; terms next to j = 1 and j = n-1 dominate
    sa, ca, sb, cb = 0.0, 0.0, 0.0, 0.0
    for j in range(1, n):
        t = j * math.pi / n
        sn = abs(math.sin(t))
        cs = math.cos(t)
        ta = sn ** -a
        tb = sn ** -b * (B * cs * cs + B0 * sn * sn)
        u = sa + ta
        if abs(sa) >= abs(ta):
            ca += (sa - u) + ta
        else:
            ca += (ta - u) + sa
        sa = u
        u = sb + tb
        if abs(sb) >= abs(tb):
            cb += (sb - u) + tb
        else:
            cb += (tb - u) + sb
        sb = u
    return a * A / 2.0 ** (a + 1.0) * (sa + ca), b / 2.0 ** (b + 1.0) * (sb + cb)


def ring_sums_np(n, A, B, B0, a, b):
    t = np.arange(1, n) * np.pi / n
    sn = np.abs(np.sin(t))
    cs = np.cos(t)
    sa = math.fsum(sn ** -a)
    sb = math.fsum(sn ** -b * (B * cs * cs + B0 * sn * sn))
    return a * A / 2.0 ** (a + 1.0) * sa, b / 2.0 ** (b + 1.0) * sb


ring_sums = pick(ring_sums_nb, ring_sums_np)

# ---------------------------------------------------------------------------
# 3-D pair interactions


@njit
def pair_gradients_nb(x, m, A, B, B0, a, b):
    """Energy and the unconstrained gradients dU/dx, dU/dm."""
    n = x.shape[0]
    gx = np.zeros((n, 3))
    gm = np.zeros((n, 3))
    U = 0.0
    Bs = B + B0
    for k in range(n):
        for l in range(k + 1, n):
            r0 = x[k, 0] - x[l, 0]
            r1 = x[k, 1] - x[l, 1]
            r2 = x[k, 2] - x[l, 2]
            d2 = r0 * r0 + r1 * r1 + r2 * r2
            d = math.sqrt(d2)
            c = m[k, 0] * m[l, 0] + m[k, 1] * m[l, 1] + m[k, 2] * m[l, 2]
            ak = m[k, 0] * r0 + m[k, 1] * r1 + m[k, 2] * r2
            al = m[l, 0] * r0 + m[l, 1] * r1 + m[l, 2] * r2
            db = d ** -b
            db2 = db / d2
            da = d ** -a
            U += B0 * c * db - Bs * ak * al * db2 + A * da
            radial = -b * B0 * c * db2 + Bs * (b + 2.0) * ak * al * db2 / d2 - a * A * da / d2
            for q in range(3):
                rq = (r0, r1, r2)[q]
                f = radial * rq - Bs * db2 * (al * m[k, q] + ak * m[l, q])
                gx[k, q] += f
                gx[l, q] -= f
                gm[k, q] += B0 * db * m[l, q] - Bs * al * db2 * rq
                gm[l, q] += B0 * db * m[k, q] - Bs * ak * db2 * rq
    return U, gx, gm


def pair_gradients_np(x, m, A, B, B0, a, b):
    n = x.shape[0]
    r = x[:, None, :] - x[None, :, :]
    d2 = np.einsum("klq,klq->kl", r, r)
    np.fill_diagonal(d2, 1.0)
    d = np.sqrt(d2)
    off = ~np.eye(n, dtype=bool)
    c = m @ m.T
    ak = np.einsum("kq,klq->kl", m, r)   # m_k . r_kl
    al = -ak.T                            # m_l . r_kl
    db = np.where(off, d ** -b, 0.0)
    db2 = db / d2
    da = np.where(off, d ** -a, 0.0)
    Bs = B + B0
    U = 0.5 * float(np.sum(B0 * c * db - Bs * ak * al * db2 + A * da))
    radial = -b * B0 * c * db2 + Bs * (b + 2.0) * ak * al * db2 / d2 - a * A * da / d2
    gx = np.einsum("kl,klq->kq", radial, r) - Bs * (
        np.sum(db2 * al, axis=1)[:, None] * m + (db2 * ak) @ m
    )
    gm = B0 * db @ m - Bs * np.einsum("kl,klq->kq", al * db2, r)
    return U, gx, gm


pair_gradients = pick(pair_gradients_nb, pair_gradients_np)

# ---------------------------------------------------------------------------
# dissipative integrator


@njit
def _rotate(mk, w, dt):
    # Rodrigues rotation of mk by angle |w| dt about w
    wn = math.sqrt(w[0] * w[0] + w[1] * w[1] + w[2] * w[2])
    th = wn * dt
    out = np.empty(3)
    if th == 0.0:
        for q in range(3):
            out[q] = mk[q]
    else:
        k0, k1, k2 = w[0] / wn, w[1] / wn, w[2] / wn
        ct, st = math.cos(th), math.sin(th)
        kd = k0 * mk[0] + k1 * mk[1] + k2 * mk[2]
        c0 = k1 * mk[2] - k2 * mk[1]
        c1 = k2 * mk[0] - k0 * mk[2]
        c2 = k0 * mk[1] - k1 * mk[0]
        out[0] = mk[0] * ct + c0 * st + k0 * kd * (1.0 - ct)
        out[1] = mk[1] * ct + c1 * st + k1 * kd * (1.0 - ct)
        out[2] = mk[2] * ct + c2 * st + k2 * kd * (1.0 - ct)
    nrm = math.sqrt(out[0] * out[0] + out[1] * out[1] + out[2] * out[2])
    for q in range(3):
        out[q] /= nrm
    return out


@njit
def advance_nb(x, m, v, w, nsteps, dt, A, B, B0, a, b, mu, inertia, ztr, zr, min_dist):
    """Advance the state in place; returns (steps_done, status).

    status 0 ok, 1 overlap, 2 non-finite.
    """
    n = x.shape[0]
    ev = math.exp(-ztr * dt / mu)
    ew = math.exp(-zr * dt / inertia)
    for step in range(nsteps):
        U, gx, gm = pair_gradients_nb(x, m, A, B, B0, a, b)
        for k in range(n):
            # torque m x (-dU/dm)
            t0 = -(m[k, 1] * gm[k, 2] - m[k, 2] * gm[k, 1])
            t1 = -(m[k, 2] * gm[k, 0] - m[k, 0] * gm[k, 2])
            t2 = -(m[k, 0] * gm[k, 1] - m[k, 1] * gm[k, 0])
            tq = (t0, t1, t2)
            for q in range(3):
                v[k, q] = ev * v[k, q] + (1.0 - ev) * (-gx[k, q]) / ztr
                w[k, q] = ew * w[k, q] + (1.0 - ew) * tq[q] / zr
                x[k, q] += dt * v[k, q]
            mk = _rotate(m[k], w[k], dt)
            for q in range(3):
                m[k, q] = mk[q]
        for k in range(n):
            for q in range(3):
                if not (math.isfinite(x[k, q]) and math.isfinite(m[k, q])):
                    return step + 1, 2
        dmin = np.inf
        for k in range(n):
            for l in range(k + 1, n):
                dd = 0.0
                for q in range(3):
                    dd += (x[k, q] - x[l, q]) ** 2
                dmin = min(dmin, dd)
        if math.sqrt(dmin) < min_dist:
            return step + 1, 1
    return nsteps, 0


def _rotate_np(m, w, dt):
    wn = np.linalg.norm(w, axis=1)
    th = wn * dt
    safe = np.where(wn > 0, wn, 1.0)
    k = w / safe[:, None]
    ct, st = np.cos(th)[:, None], np.sin(th)[:, None]
    kd = np.sum(k * m, axis=1)[:, None]
    out = m * ct + np.cross(k, m) * st + k * kd * (1.0 - ct)
    out = np.where((wn > 0)[:, None], out, m)
    return out / np.linalg.norm(out, axis=1)[:, None]


def advance_np(x, m, v, w, nsteps, dt, A, B, B0, a, b, mu, inertia, ztr, zr, min_dist):
    ev = math.exp(-ztr * dt / mu)
    ew = math.exp(-zr * dt / inertia)
    iu = np.triu_indices(x.shape[0], 1)
    for step in range(nsteps):
        _, gx, gm = pair_gradients_np(x, m, A, B, B0, a, b)
        torque = np.cross(m, -gm)
        v[:] = ev * v + (1.0 - ev) * (-gx) / ztr
        w[:] = ew * w + (1.0 - ew) * torque / zr
        x += dt * v
        m[:] = _rotate_np(m, w, dt)
        if not (np.all(np.isfinite(x)) and np.all(np.isfinite(m))):
            return step + 1, 2
        if x.shape[0] > 1 and np.min(np.linalg.norm(x[:, None, :] - x[None, :, :], axis=2)[iu]) < min_dist:
            return step + 1, 1
    return nsteps, 0


advance = pick(advance_nb, advance_np)
