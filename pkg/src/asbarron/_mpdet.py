"""Adaptive-precision determinants for Gram matrices of exponentials.

Determinants such as ``det(exp(t * w_i . w_j))`` fall far below the
float64 resolution of an LU factorisation once the rows of ``w`` are
small. They are recomputed here in arbitrary precision, doubling the
working precision until two successive results agree.
"""

import math

import mpmath
import numpy as np

from ._errors import NumericalError

_MAX_DPS = 1 << 15


def _exact_gram(ctx, w):
    rows = [[ctx.mpf(float(v)) for v in row] for row in w]
    n = len(rows)
    G = [[None] * n for _ in range(n)]
    for i in range(n):
        for j in range(i, n):
            G[i][j] = G[j][i] = ctx.fsum(p * q for p, q in zip(rows[i], rows[j]))
    return G


def lu_det(rows):
    """Determinant of a list-of-lists matrix of mp numbers by partial-pivot LU.

    Plain lists avoid the per-element overhead of ``mpmath.matrix``.
    """
    A = [list(r) for r in rows]
    n = len(A)
    det = 1
    for col in range(n):
        piv = max(range(col, n), key=lambda r: abs(A[r][col]))
        if not A[piv][col]:
            return A[piv][col] * 0
        if piv != col:
            A[col], A[piv] = A[piv], A[col]
            det = -det
        pivot_row = A[col]
        pivot = pivot_row[col]
        det = det * pivot
        for r in range(col + 1, n):
            row = A[r]
            f = row[col] / pivot
            if f:
                for c in range(col + 1, n):
                    row[c] -= f * pivot_row[c]
    return det


def _gram_exp_logdet_at(w, scale, dps):
    ctx = mpmath.mp
    with ctx.workdps(dps):
        G = _exact_gram(ctx, w)
        t = ctx.mpf(scale)
        det = lu_det([[ctx.exp(t * g) for g in row] for row in G])
        if det == 0:
            return 0, -math.inf
        return (1 if det > 0 else -1), float(ctx.log(abs(det)))


def gram_exp_logdet(w, scale=1.0, rtol=1e-12, start_dps=40):
    """Return ``(sign, log|det|)`` of ``(exp(scale * w_i . w_j))_ij``.

    The Gram entries are formed exactly from the float64 rows of ``w``,
    so exact low-rank structure (e.g. ``d < n``) is preserved. For
    distinct rows and ``scale > 0`` the matrix is positive definite, so a
    zero or negative result only means the precision is still too low.
    """
    w = np.asarray(w, dtype=np.float64)
    definite = scale > 0 and len({tuple(row) for row in w.tolist()}) == len(w)
    dps = start_dps
    prev = _gram_exp_logdet_at(w, scale, dps)
    while dps < _MAX_DPS:
        dps *= 2
        cur = _gram_exp_logdet_at(w, scale, dps)
        settled = cur[0] > 0 if definite else cur[0] == prev[0]
        if settled and cur[0] == prev[0] and (
            cur[1] == prev[1] or abs(cur[1] - prev[1]) <= rtol * max(1.0, abs(cur[1]))
        ):
            return cur
        prev = cur
    raise NumericalError(f"determinant did not stabilise below {_MAX_DPS} digits")


def gram_exp_series(w, n_coeffs=None, n_points=None, dps=None):
    """Taylor coefficients ``D_k`` of ``t -> det(exp(t * w_i . w_j))``.

    Coefficients are extracted by a discrete Cauchy integral on the unit
    circle in high precision. By Cauchy-Binet every ``D_k`` is
    non-negative and ``D_k = 0`` below the minimal total degree of ``n``
    distinct monomials, which is enforced exactly.
    """
    w = np.asarray(w, dtype=np.float64)
    n, d = w.shape
    k0 = minimal_total_degree(n, d)
    if n_coeffs is None:
        n_coeffs = k0 + 60
    if n_points is None:
        n_points = 1 << max(6, math.ceil(math.log2(1.5 * n_coeffs)))
    if n_points <= n_coeffs:
        raise ValueError("n_points must exceed n_coeffs to avoid aliasing")
    ctx = mpmath.mp
    if dps is None:
        # leading coefficient scales roughly like 1/prod(k!) times small Vandermonde factors
        dps = 60 + 3 * k0 + 4 * n
    with ctx.workdps(dps):
        G = _exact_gram(ctx, w)
        values = []
        for j in range(n_points):
            z = ctx.expjpi(ctx.mpf(2 * j) / n_points)
            values.append(lu_det([[ctx.exp(z * g) for g in row] for row in G]))
        coeffs = np.zeros(n_coeffs)
        for k in range(k0, n_coeffs):
            acc = ctx.fsum(
                values[j] * ctx.expjpi(-ctx.mpf(2 * j * k) / n_points) for j in range(n_points)
            )
            coeffs[k] = float(ctx.re(acc)) / n_points
    return np.maximum(coeffs, 0.0)


def minimal_total_degree(n, d):
    """Smallest sum of total degrees over ``n`` distinct monomials in ``d`` variables."""
    remaining = n
    total = 0
    k = 0
    while remaining > 0:
        count = math.comb(k + d - 1, d - 1)
        take = min(count, remaining)
        total += take * k
        remaining -= take
        k += 1
    return total
