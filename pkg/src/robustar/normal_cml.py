"""Conditional maximum likelihood under normal innovations."""
import math
from dataclasses import dataclass

import numpy as np

from . import kernels
from ._linalg import solve_symmetric
from .exceptions import DimensionError
from .model import apply_backshift_filter, raw_residuals

LOG_2PI = math.log(2.0 * math.pi)


@dataclass(frozen=True)
class CrossProductPair:
    """Lagged-residual moments: ``R0`` (length p) and ``R`` (p x p)."""

    R0: np.ndarray
    R: np.ndarray


@dataclass(frozen=True)
class FisherBlocks:
    """Block-diagonal observed information for ``(beta, phi, sigma)``."""

    beta: np.ndarray
    phi: np.ndarray
    sigma: float

    @property
    def size(self):
        return self.beta.shape[0] + self.phi.shape[0] + 1

    def dense(self):
        m, p = self.beta.shape[0], self.phi.shape[0]
        F = np.zeros((self.size, self.size))
        F[:m, :m] = self.beta
        F[m:m + p, m:m + p] = self.phi
        F[-1, -1] = self.sigma
        return F


def _check_sigma2(sigma2):
    if not sigma2 > 0:
        raise ValueError(f"sigma2 must be positive, got {sigma2}")


def cond_loglik_normal(data, params):
    """Normal conditional log-likelihood over t = p+1..N, constants included."""
    _check_sigma2(params.sigma2)
    filt = apply_backshift_filter(data, params.ar)
    r = filt.residuals(params.beta)
    n = r.shape[0]
    return (-0.5 * n * LOG_2PI - 0.5 * n * math.log(params.sigma2)
            - kernels.weighted_ssq(r) / (2.0 * params.sigma2))


def score_normal(data, params):
    """Analytic gradient w.r.t. ``(beta, phi, sigma2)``."""
    _check_sigma2(params.sigma2)
    filt = apply_backshift_filter(data, params.ar)
    r = filt.residuals(params.beta)
    e = raw_residuals(data, params.beta)
    p, s2 = params.p, params.sigma2
    n = r.shape[0]
    g_beta = filt.fX.T @ r / s2
    g_phi = np.array([r @ e[p - l:data.N - l] for l in range(1, p + 1)]) / s2
    g_s2 = -n / (2.0 * s2) + (r @ r) / (2.0 * s2 * s2)
    return np.concatenate([g_beta, g_phi, [g_s2]])


def build_cross_products(residuals, p, weights=None):
    """``R0[l] = sum_t w_t e_t e_{t-l}``, ``R[l, m] = sum_t w_t e_{t-l} e_{t-m}``.

    Sums run over t = p+1..N; ``weights`` is indexed on the same window.
    """
    e = np.asarray(residuals, dtype=np.float64).reshape(-1)
    if p < 0 or e.shape[0] <= p:
        raise DimensionError(f"need more than p={p} residuals, got {e.shape[0]}")
    if weights is not None:
        weights = np.asarray(weights, dtype=np.float64).reshape(-1)
        if weights.shape[0] != e.shape[0] - p:
            raise DimensionError(
                f"weights have length {weights.shape[0]}, expected {e.shape[0] - p}")
        if (weights < 0).any():
            raise ValueError("weights must be non-negative")
    if p == 0:
        return CrossProductPair(np.zeros(0), np.zeros((0, 0)))
    R0, R = kernels.cross_products(e, p, weights)
    return CrossProductPair(R0=R0, R=R)


def update_beta_normal(filtered):
    A, b = kernels.weighted_gram(filtered.fX, filtered.fy)
    return solve_symmetric(A, b, "beta-update")


def update_phi_normal(residuals, p):
    cross = build_cross_products(residuals, p)
    return solve_symmetric(cross.R, cross.R0, "phi-update")


def update_sigma2_normal(filtered, beta):
    r = filtered.residuals(beta)
    return kernels.weighted_ssq(r) / r.shape[0]


def fisher_normal(filtered, cross, sigma2, n_eff):
    """Observed information blocks for the normal fit.

    The sigma entry is ``n_eff / sigma2**2`` as the estimator's reference
    form gives it; it is not the second derivative of the log-likelihood
    in either sigma or sigma2.
    """
    _check_sigma2(sigma2)
    A, _ = kernels.weighted_gram(filtered.fX, filtered.fy)
    return FisherBlocks(beta=A / sigma2, phi=np.asarray(cross.R) / sigma2,
                        sigma=n_eff / sigma2 ** 2)
