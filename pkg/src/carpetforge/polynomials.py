"""Orthogonal polynomials by forward three-term recurrence.

All routines accept array arguments and, for Jacobi, complex parameters.
"""

import numpy as np


def hermite_functions(nmax, xi):
    """Normalized Hermite functions h_0..h_nmax at xi, shape (nmax+1, len).

    h_n(xi) = (2^n n! sqrt(pi))^{-1/2} H_n(xi) exp(-xi^2/2), built with the
    stable normalized recurrence so no factorials appear.
    """
    xi = np.asarray(xi, dtype=float)
    out = np.empty((nmax + 1,) + xi.shape)
    out[0] = np.pi ** -0.25 * np.exp(-0.5 * xi * xi)
    if nmax >= 1:
        out[1] = np.sqrt(2.0) * xi * out[0]
    for n in range(2, nmax + 1):
        out[n] = (np.sqrt(2.0 / n) * xi * out[n - 1]
                  - np.sqrt((n - 1.0) / n) * out[n - 2])
    return out


def hermite(n, x):
    """Physicists' Hermite polynomial H_n."""
    x = np.asarray(x)
    p0 = np.ones_like(x, dtype=float)
    if n == 0:
        return p0
    p1 = 2.0 * x
    for k in range(1, n):
        p0, p1 = p1, 2.0 * x * p1 - 2.0 * k * p0
    return p1


def laguerre(n, k, x):
    """Generalized Laguerre polynomial L_n^(k)(x)."""
    x = np.asarray(x)
    p0 = np.ones_like(x, dtype=np.result_type(x, k, float))
    if n == 0:
        return p0
    p1 = 1.0 + k - x
    for m in range(1, n):
        p0, p1 = p1, ((2 * m + 1 + k - x) * p1 - (m + k) * p0) / (m + 1)
    return p1


def _binom(z, k):
    out = 1.0 + 0j if isinstance(z, complex) else 1.0
    for i in range(k):
        out = out * (z - i) / (i + 1)
    return out


def jacobi_sum(n, a, b, x):
    """Jacobi polynomial from its finite binomial sum.

    Polynomial in a and b, so it has no poles; used where the recurrence
    hits a vanishing leading coefficient.
    """
    x = np.asarray(x)
    xm = (x - 1.0) / 2.0
    xp = (x + 1.0) / 2.0
    total = 0.0
    for j in range(n + 1):
        total = total + _binom(n + a, n - j) * _binom(n + b, j) * xm ** j * xp ** (n - j)
    return total + 0.0 * x


def jacobi(n, a, b, x):
    """Jacobi polynomial P_n^(a,b)(x); a, b and x may be complex."""
    x = np.asarray(x)
    dtype = np.result_type(x, a, b, float)
    p0 = np.ones(x.shape, dtype=dtype)
    if n == 0:
        return p0
    p1 = ((a - b) + (a + b + 2) * x) / 2.0
    ab = a + b
    for m in range(2, n + 1):
        lead = 2 * m * (m + ab) * (2 * m + ab - 2)
        if abs(lead) < 1e-300:
            return jacobi_sum(n, a, b, x).astype(dtype)
        c1 = (2 * m + ab - 1) * ((2 * m + ab) * (2 * m + ab - 2) * x + a * a - b * b)
        c2 = 2 * (m + a - 1) * (m + b - 1) * (2 * m + ab)
        p0, p1 = p1, (c1 * p1 - c2 * p0) / lead
    return p1
