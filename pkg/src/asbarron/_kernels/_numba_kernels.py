"""Compiled inner loops. Signatures mirror ``_numpy_kernels`` exactly."""

import math

import numpy as np
from numba import njit

RELU, SOFTPLUS, HIGHPASS, LOWPASS = 0, 1, 2, 3

_EULER = 0.5772156649015329
_HALF_PI = 0.5 * math.pi


@njit(cache=True, nogil=True)
def si_scalar(y):
    t = abs(y)
    if t == 0.0:
        return 0.0
    if t <= 4.0:
        t2 = t * t
        term = t
        total = t
        k = 0
        while True:
            term *= -t2 / ((2 * k + 2) * (2 * k + 3))
            contrib = term / (2 * k + 3)
            total += contrib
            k += 1
            if abs(contrib) < 1e-17 * abs(total) or k > 60:
                break
        value = total
    else:
        # modified Lentz continued fraction for E1(i t)
        b = complex(1.0, t)
        c = complex(1e300, 0.0)
        d = 1.0 / b
        h = d
        for i in range(2, 200):
            a = -float((i - 1) * (i - 1))
            b = b + 2.0
            d = 1.0 / (a * d + b)
            c = b + a / c
            delta = c * d
            h = h * delta
            if abs(delta.real - 1.0) + abs(delta.imag) < 1e-16:
                break
        h = complex(math.cos(t), -math.sin(t)) * h
        value = _HALF_PI + h.imag
    return value if y > 0 else -value


@njit(cache=True, nogil=True)
def sine_integral(y):
    out = np.empty(y.shape[0])
    for i in range(y.shape[0]):
        out[i] = si_scalar(y[i])
    return out


@njit(cache=True, nogil=True)
def _activation(y, code, gamma):
    if code == RELU:
        return y if y > 0.0 else 0.0
    if code == SOFTPLUS:
        return max(y, 0.0) + math.log1p(math.exp(-abs(y)))
    hp = 0.5 * abs(y) - math.cos(gamma * y) / (math.pi * gamma) - y * si_scalar(gamma * y) / math.pi
    if code == HIGHPASS:
        return hp
    return (y if y > 0.0 else 0.0) - hp


@njit(cache=True, nogil=True)
def antisym_ridge_values(xs, W, b, a, perms, signs, code, gamma):
    S, n, d = xs.shape
    K = W.shape[0]
    P = perms.shape[0]
    norm = 1.0 / math.sqrt(P)
    out = np.zeros(S)
    D = np.empty((n, n))
    for s in range(S):
        total = 0.0
        for k in range(K):
            for i in range(n):
                for j in range(n):
                    acc = 0.0
                    for q in range(d):
                        acc += W[k, j, q] * xs[s, i, q]
                    D[i, j] = acc
            inner = 0.0
            for p in range(P):
                y = b[k]
                for j in range(n):
                    y += D[perms[p, j], j]
                inner += signs[p] * _activation(y, code, gamma)
            total += a[k] * inner
        out[s] = total * norm
    return out


@njit(cache=True, nogil=True)
def softplus_net_jacobian(xs, W, b, a, perms, signs):
    S, n, d = xs.shape
    K = W.shape[0]
    P = perms.shape[0]
    norm = 1.0 / math.sqrt(P)
    values = np.zeros(S)
    jac = np.zeros((S, K, 2 + n * d))
    D = np.empty((n, n))
    for s in range(S):
        total = 0.0
        for k in range(K):
            for i in range(n):
                for j in range(n):
                    acc = 0.0
                    for q in range(d):
                        acc += W[k, j, q] * xs[s, i, q]
                    D[i, j] = acc
            sp_sum = 0.0
            for p in range(P):
                y = b[k]
                for j in range(n):
                    y += D[perms[p, j], j]
                sg = signs[p]
                sp_sum += sg * (max(y, 0.0) + math.log1p(math.exp(-abs(y))))
                if y >= 0.0:
                    sig = 1.0 / (1.0 + math.exp(-y))
                else:
                    e = math.exp(y)
                    sig = e / (1.0 + e)
                g = sg * sig * a[k] * norm
                jac[s, k, 1] += g
                for j in range(n):
                    row = perms[p, j]
                    for q in range(d):
                        jac[s, k, 2 + j * d + q] += g * xs[s, row, q]
            jac[s, k, 0] = sp_sum * norm
            total += a[k] * sp_sum
        values[s] = total * norm
    return values, jac


@njit(cache=True, nogil=True)
def _complex_det_inplace(A):
    """Determinant by partial-pivot LU; overwrites ``A``."""
    n = A.shape[0]
    det = complex(1.0, 0.0)
    for col in range(n):
        piv = col
        best = abs(A[col, col])
        for r in range(col + 1, n):
            v = abs(A[r, col])
            if v > best:
                best = v
                piv = r
        if best == 0.0:
            return complex(0.0, 0.0)
        if piv != col:
            for c in range(n):
                tmp = A[col, c]
                A[col, c] = A[piv, c]
                A[piv, c] = tmp
            det = -det
        pivot = A[col, col]
        det *= pivot
        for r in range(col + 1, n):
            f = A[r, col] / pivot
            if f != 0:
                for c in range(col + 1, n):
                    A[r, c] -= f * A[col, c]
    return det


@njit(cache=True, nogil=True)
def planewave_sum_values(xs, Wt, coef):
    S, n, d = xs.shape
    m = Wt.shape[0]
    norm = 1.0
    for k in range(2, n + 1):
        norm *= k
    norm = 1.0 / math.sqrt(norm)
    out = np.zeros(S, dtype=np.complex128)
    M = np.empty((n, n), dtype=np.complex128)
    for s in range(S):
        total = complex(0.0, 0.0)
        for t in range(m):
            for i in range(n):
                for j in range(n):
                    ph = 0.0
                    for q in range(d):
                        ph += Wt[t, j, q] * xs[s, i, q]
                    M[i, j] = complex(math.cos(ph), math.sin(ph))
            total += coef[t] * _complex_det_inplace(M)
        out[s] = total * norm
    return out
