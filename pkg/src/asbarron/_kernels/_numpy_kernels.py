"""Vectorised numpy versions of the compiled kernels.

Used when numba is disabled; also the reference the compiled path is
tested against. Work is chunked over samples to bound the
``samples x permutations x atoms`` temporaries.
"""

import math

import numpy as np

RELU, SOFTPLUS, HIGHPASS, LOWPASS = 0, 1, 2, 3

_CHUNK_ELEMS = 1 << 22


def sine_integral(y):
    y = np.asarray(y, dtype=np.float64)
    t = np.abs(y)
    out = np.zeros_like(t)
    small = (t > 0) & (t <= 4.0)
    if small.any():
        ts = t[small]
        t2 = ts * ts
        term = ts.copy()
        total = ts.copy()
        for k in range(40):
            term = term * (-t2 / ((2 * k + 2) * (2 * k + 3)))
            total = total + term / (2 * k + 3)
        out[small] = total
    large = t > 4.0
    if large.any():
        tl = t[large]
        b = 1.0 + 1j * tl
        c = np.full(tl.shape, 1e300 + 0j)
        d = 1.0 / b
        h = d.copy()
        for i in range(2, 200):
            a = -float((i - 1) ** 2)
            b = b + 2.0
            d = 1.0 / (a * d + b)
            c = b + a / c
            delta = c * d
            h = h * delta
            if np.all(np.abs(delta.real - 1.0) + np.abs(delta.imag) < 1e-16):
                break
        h = (np.cos(tl) - 1j * np.sin(tl)) * h
        out[large] = 0.5 * math.pi + h.imag
    return np.where(y < 0, -out, out)


def activation(y, code, gamma):
    if code == RELU:
        return np.maximum(y, 0.0)
    if code == SOFTPLUS:
        return np.maximum(y, 0.0) + np.log1p(np.exp(-np.abs(y)))
    hp = 0.5 * np.abs(y) - np.cos(gamma * y) / (math.pi * gamma) - y * sine_integral(gamma * y) / math.pi
    if code == HIGHPASS:
        return hp
    return np.maximum(y, 0.0) - hp


def _ridge_arguments(xs, W, b, perms):
    # y[s, p, k] = sum_j W[k, j] . xs[s, perms[p, j]] + b[k]
    D = np.einsum("sid,kjd->skij", xs, W)
    cols = np.arange(perms.shape[1])
    y = D[:, :, perms, cols].sum(axis=-1)  # (S, K, P)
    return y + b[None, :, None]


def _chunks(S, per_sample):
    step = max(1, _CHUNK_ELEMS // max(per_sample, 1))
    for lo in range(0, S, step):
        yield slice(lo, min(S, lo + step))


def antisym_ridge_values(xs, W, b, a, perms, signs, code, gamma):
    S = xs.shape[0]
    P = perms.shape[0]
    out = np.empty(S)
    for sl in _chunks(S, W.shape[0] * P * perms.shape[1]):
        y = _ridge_arguments(xs[sl], W, b, perms)
        act = activation(y, code, gamma)
        out[sl] = np.einsum("skp,p,k->s", act, signs, a) / math.sqrt(P)
    return out


def softplus_net_jacobian(xs, W, b, a, perms, signs):
    S, n, d = xs.shape
    K = W.shape[0]
    P = perms.shape[0]
    norm = 1.0 / math.sqrt(P)
    values = np.empty(S)
    jac = np.empty((S, K, 2 + n * d))
    for sl in _chunks(S, K * P * n * max(d, 2)):
        y = _ridge_arguments(xs[sl], W, b, perms)
        sp = np.maximum(y, 0.0) + np.log1p(np.exp(-np.abs(y)))
        sig = 0.5 * (1.0 + np.tanh(0.5 * y))
        d_a = np.einsum("skp,p->sk", sp, signs) * norm
        g = sig * signs[None, None, :] * (a[None, :, None] * norm)  # (s, k, p)
        xp = xs[sl][:, perms, :]  # (s, p, n, d)
        d_w = np.einsum("skp,spjq->skjq", g, xp).reshape(g.shape[0], K, n * d)
        jac[sl, :, 0] = d_a
        jac[sl, :, 1] = g.sum(axis=2)
        jac[sl, :, 2:] = d_w
        values[sl] = d_a @ a
    return values, jac


def planewave_sum_values(xs, Wt, coef):
    S, n, _ = xs.shape
    m = Wt.shape[0]
    out = np.empty(S, dtype=np.complex128)
    norm = 1.0 / math.sqrt(math.factorial(n))
    for sl in _chunks(S, m * n * n * 4):
        phase = np.einsum("sid,tjd->stij", xs[sl], Wt)
        dets = np.linalg.det(np.exp(1j * phase))
        out[sl] = dets @ coef * norm
    return out
