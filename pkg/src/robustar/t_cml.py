"""Conditional maximum likelihood under Student-t innovations.

The density is written ``f(a) = (c_nu / sigma) * (nu + a^2/sigma^2)^(-(nu+1)/2)``
with ``c_nu = Gamma((nu+1)/2) nu^(nu/2) / (sqrt(pi) Gamma(nu/2))``. The
degrees of freedom act as a fixed robustness tuning constant and are never
estimated.
"""
import math
from dataclasses import dataclass

import numpy as np

from . import kernels
from ._linalg import solve_symmetric
from .exceptions import DimensionError
from .model import apply_backshift_filter, raw_residuals
from .normal_cml import FisherBlocks, build_cross_products


@dataclass(frozen=True)
class TConfig:
    nu: float = 3.0

    def __post_init__(self):
        if not (math.isfinite(self.nu) and self.nu > 0):
            raise ValueError(f"degrees of freedom must be positive, got {self.nu}")


def log_c_nu(nu):
    return (math.lgamma((nu + 1.0) / 2.0) + 0.5 * nu * math.log(nu)
            - 0.5 * math.log(math.pi) - math.lgamma(nu / 2.0))


def _check(sigma2, nu):
    if not sigma2 > 0:
        raise ValueError(f"scale must be positive, got {sigma2}")
    if not nu > 0:
        raise ValueError(f"degrees of freedom must be positive, got {nu}")


def t_log_density(a, sigma, nu):
    """Log density at ``a``; vectorised over ``a``."""
    _check(sigma, nu)
    a = np.asarray(a, dtype=np.float64)
    out = log_c_nu(nu) - math.log(sigma) - 0.5 * (nu + 1.0) * np.log(nu + (a / sigma) ** 2)
    return float(out) if out.ndim == 0 else out


def cond_loglik_t(data, params, cfg=TConfig()):
    """t conditional log-likelihood; ``ln c_nu`` enters once per observation."""
    nu = cfg.nu
    _check(params.sigma2, nu)
    filt = apply_backshift_filter(data, params.ar)
    r = filt.residuals(params.beta)
    n = r.shape[0]
    return (n * log_c_nu(nu) - 0.5 * n * math.log(params.sigma2)
            - 0.5 * (nu + 1.0) * float(np.sum(np.log(nu + r * r / params.sigma2))))


def compute_weights(filtered, beta, sigma2, cfg=TConfig()):
    """``w_t = (nu + 1) / (nu + r_t^2 / sigma2)`` on the filtered residuals."""
    _check(sigma2, cfg.nu)
    return kernels.t_weights(filtered.residuals(beta), sigma2, cfg.nu)


def _check_weights(weights, n):
    w = np.asarray(weights, dtype=np.float64).reshape(-1)
    if w.shape[0] != n:
        raise DimensionError(f"weights have length {w.shape[0]}, expected {n}")
    return w


def update_beta_t(filtered, weights):
    w = _check_weights(weights, filtered.n_eff)
    A, b = kernels.weighted_gram(filtered.fX, filtered.fy, w)
    return solve_symmetric(A, b, "beta-update")


def update_phi_t(residuals, weights, p):
    cross = build_cross_products(residuals, p, weights)
    return solve_symmetric(cross.R, cross.R0, "phi-update")


def update_sigma2_t(filtered, beta, weights, n_eff=None):
    r = filtered.residuals(beta)
    w = _check_weights(weights, r.shape[0])
    n_eff = r.shape[0] if n_eff is None else n_eff
    return kernels.weighted_ssq(r, w) / n_eff


def score_t(data, params, cfg=TConfig()):
    """Analytic gradient w.r.t. ``(beta, phi, sigma)``; note sigma, not sigma2."""
    nu = cfg.nu
    _check(params.sigma2, nu)
    filt = apply_backshift_filter(data, params.ar)
    r = filt.residuals(params.beta)
    e = raw_residuals(data, params.beta)
    p, s2 = params.p, params.sigma2
    n = r.shape[0]
    w = kernels.t_weights(r, s2, nu)
    wr = w * r
    g_beta = filt.fX.T @ wr / s2
    g_phi = np.array([wr @ e[p - l:data.N - l] for l in range(1, p + 1)]) / s2
    sigma = math.sqrt(s2)
    g_sigma = -n / sigma + float(wr @ r) / (sigma * s2)
    return np.concatenate([g_beta, g_phi, [g_sigma]])


def fisher_t(filtered, weights, cross_w, sigma2, n_eff):
    """Weighted counterpart of :func:`robustar.normal_cml.fisher_normal`."""
    if not sigma2 > 0:
        raise ValueError(f"sigma2 must be positive, got {sigma2}")
    w = _check_weights(weights, filtered.n_eff)
    A, _ = kernels.weighted_gram(filtered.fX, filtered.fy, w)
    return FisherBlocks(beta=A / sigma2, phi=np.asarray(cross_w.R) / sigma2,
                        sigma=n_eff / sigma2 ** 2)
