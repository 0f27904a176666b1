"""Pure numpy implementations of the inner-loop kernels.

Must stay numerically interchangeable with ``_kernels.pyx``; both are run
through the same tests (see ``tests/test_kernels.py``).
"""
import numpy as np


def backshift_filter(y, X, phi):
    """Return ``(fy, fX)`` with ``fy[k] = y[t] - sum_j phi[j] y[t-j]``, t = k + p."""
    y = np.asarray(y, dtype=np.float64)
    X = np.asarray(X, dtype=np.float64)
    phi = np.asarray(phi, dtype=np.float64)
    p = phi.shape[0]
    n = y.shape[0]
    fy = y[p:].copy()
    fX = X[p:].copy()
    for j in range(1, p + 1):
        fy -= phi[j - 1] * y[p - j:n - j]
        fX -= phi[j - 1] * X[p - j:n - j]
    return fy, fX


def cross_products(e, p, w=None):
    """Return ``(R0, R)`` built from lagged residuals over t = p+1..N."""
    e = np.asarray(e, dtype=np.float64)
    n = e.shape[0]
    lags = np.empty((n - p, p))
    for l in range(1, p + 1):
        lags[:, l - 1] = e[p - l:n - l]
    cur = e[p:]
    if w is None:
        R0 = lags.T @ cur
        R = lags.T @ lags
    else:
        w = np.asarray(w, dtype=np.float64)
        R0 = lags.T @ (w * cur)
        R = lags.T @ (w[:, None] * lags)
    return R0, R


def t_weights(r, sigma2, nu):
    r = np.asarray(r, dtype=np.float64)
    return (nu + 1.0) / (nu + r * r / sigma2)


def weighted_gram(fX, fy, w=None):
    """Return ``(fX' W fX, fX' W fy)``; ``w=None`` means W = I."""
    fX = np.asarray(fX, dtype=np.float64)
    fy = np.asarray(fy, dtype=np.float64)
    if w is None:
        return fX.T @ fX, fX.T @ fy
    w = np.asarray(w, dtype=np.float64)
    wX = w[:, None] * fX
    return wX.T @ fX, wX.T @ fy


def weighted_ssq(r, w=None):
    r = np.asarray(r, dtype=np.float64)
    if w is None:
        return float(r @ r)
    return float(np.asarray(w, dtype=np.float64) @ (r * r))
