"""Iteratively reweighted fitting of regression models with AR(p) errors.

One cycle, starting from ``(beta, phi, sigma2)`` at iteration m:

1. weights ``w`` from the current parameters (all ones for the normal model);
2. ``phi`` from the weighted lagged-residual moments at the current ``beta``;
3. ``beta`` by weighted least squares on data filtered with the new ``phi``;
4. ``sigma2`` as the weighted mean square of the new filtered residuals.

Steps 3 and 4 deliberately reuse the weights of step 1.
"""
import logging
import math
from dataclasses import dataclass, field

import numpy as np

from . import kernels
from ._linalg import solve_symmetric
from .exceptions import FitError, OrderTooLargeError, SingularSystemError
from .inference import confidence_interval, information_criteria, standard_errors
from .model import (ARSpec, ParameterSet, apply_backshift_filter,
                    check_stationarity, raw_residuals)
from .normal_cml import (LOG_2PI, build_cross_products, fisher_normal,
                         update_phi_normal)
from .t_cml import fisher_t, log_c_nu

logger = logging.getLogger(__name__)

DISTRIBUTIONS = ("normal", "t")
SIGMA2_FLOOR_FACTOR = 1e-12
ASCENT_SLACK = 1e-10


@dataclass(frozen=True)
class SolverConfig:
    distribution: str = "normal"
    nu: float = 3.0
    p: int = 0
    tol: float = 1e-10
    max_iter: int = 500
    level: float = 0.95

    def __post_init__(self):
        dist = {"student_t": "t", "student-t": "t"}.get(self.distribution, self.distribution)
        object.__setattr__(self, "distribution", dist)
        if dist not in DISTRIBUTIONS:
            raise ValueError(f"distribution must be one of {DISTRIBUTIONS}, got {self.distribution!r}")
        if not (self.nu > 0 and math.isfinite(self.nu)):
            raise ValueError(f"nu must be positive, got {self.nu}")
        if int(self.p) != self.p or self.p < 0:
            raise ValueError(f"AR order must be a non-negative integer, got {self.p}")
        object.__setattr__(self, "p", int(self.p))
        if not self.tol > 0:
            raise ValueError(f"tol must be positive, got {self.tol}")
        if self.max_iter < 1:
            raise ValueError(f"max_iter must be >= 1, got {self.max_iter}")
        if not 0 < self.level < 1:
            raise ValueError(f"level must lie in (0, 1), got {self.level}")


@dataclass(frozen=True)
class IterationRecord:
    iteration: int
    beta: np.ndarray
    phi: np.ndarray
    sigma2: float
    loglik: float


@dataclass
class FitResult:
    params: ParameterSet
    weights: np.ndarray
    loglik: float
    fisher: object
    se: np.ndarray
    ci: list
    aic: float
    bic: float
    iterations: int
    converged: bool
    stationary: bool
    names: tuple
    distribution: str
    nu: float
    n_eff: int
    level: float
    sigma2_floored: bool = False
    trace: list = field(default_factory=list)
    warnings: list = field(default_factory=list)

    @property
    def beta(self):
        return self.params.beta

    @property
    def phi(self):
        return self.params.phi

    @property
    def sigma2(self):
        return self.params.sigma2

    @property
    def sigma(self):
        return math.sqrt(self.params.sigma2)

    @property
    def n_params(self):
        return self.params.beta.shape[0] + self.params.p + 1

    def point_estimates(self):
        """``(beta, phi, sigma)`` stacked in report order."""
        return np.concatenate([self.beta, self.phi, [self.sigma]])

    def estimates(self):
        return [
            {"name": name, "value": float(iv.point), "se": float(iv.se),
             "ci_lower": float(iv.lower), "ci_upper": float(iv.upper)}
            for name, iv in zip(self.names, self.ci)
        ]

    def loglik_trace(self):
        return np.array([rec.loglik for rec in self.trace])


def _loglik_from_residuals(r, sigma2, distribution, nu):
    n = r.shape[0]
    if distribution == "normal":
        return (-0.5 * n * LOG_2PI - 0.5 * n * math.log(sigma2)
                - kernels.weighted_ssq(r) / (2.0 * sigma2))
    return (n * log_c_nu(nu) - 0.5 * n * math.log(sigma2)
            - 0.5 * (nu + 1.0) * float(np.sum(np.log(nu + r * r / sigma2))))


def _sigma2_floor(data):
    var = float(np.var(data.y))
    return SIGMA2_FLOOR_FACTOR * var if var > 0 else np.finfo(float).tiny


def _check_sizes(data, p):
    if data.N <= data.M + p:
        raise OrderTooLargeError(
            f"need N > M + p, got N={data.N}, M={data.M}, p={p}")


def initial_values(data, p):
    """Least-squares start: OLS beta, then phi and sigma2 from its residuals.

    ``sigma2`` may be 0 for a noiseless fit, so this returns a plain tuple
    ``(beta, phi, sigma2)`` rather than a validated :class:`ParameterSet`.
    """
    _check_sizes(data, p)
    try:
        A, b = kernels.weighted_gram(data.X, data.y)
        beta = solve_symmetric(A, b, "initial OLS")
        e = raw_residuals(data, beta)
        phi = update_phi_normal(e, p) if p > 0 else np.zeros(0)
    except SingularSystemError as exc:
        raise FitError(f"initial values: {exc}") from exc
    filt = apply_backshift_filter(data, ARSpec(phi))
    r = filt.residuals(beta)
    return beta, phi, kernels.weighted_ssq(r) / r.shape[0]


def ira_cycle(data, beta, phi, sigma2, cfg):
    """Run one weight/phi/beta/sigma2 cycle; returns the new state and residuals."""
    p = cfg.p
    filt = apply_backshift_filter(data, ARSpec(phi))
    w = None
    if cfg.distribution == "t":
        w = kernels.t_weights(filt.residuals(beta), sigma2, cfg.nu)
    if p > 0:
        e = raw_residuals(data, beta)
        cross = build_cross_products(e, p, w)
        phi_new = solve_symmetric(cross.R, cross.R0, "phi-update")
    else:
        phi_new = np.zeros(0)
    filt_new = apply_backshift_filter(data, ARSpec(phi_new))
    A, b = kernels.weighted_gram(filt_new.fX, filt_new.fy, w)
    beta_new = solve_symmetric(A, b, "beta-update")
    r = filt_new.residuals(beta_new)
    sigma2_new = kernels.weighted_ssq(r, w) / r.shape[0]
    return beta_new, phi_new, sigma2_new, r


def fit(data, cfg=None, start=None):
    """Estimate ``(beta, phi, sigma2)`` by the iteratively reweighted algorithm.

    Parameters
    ----------
    data : RegressionDataset
    cfg : SolverConfig, optional
    start : tuple, optional
        ``(beta, phi, sigma2)`` to start from instead of :func:`initial_values`.

    Returns
    -------
    FitResult
        Returned also when the iteration limit is hit; check ``converged``.

    Raises
    ------
    FitError
        When a linear solve in the cycle is singular.
    """
    cfg = cfg or SolverConfig()
    p = cfg.p
    _check_sizes(data, p)
    if start is None:
        beta, phi, sigma2 = initial_values(data, p)
    else:
        beta, phi, sigma2 = (np.asarray(start[0], float), np.asarray(start[1], float),
                             float(start[2]))
    floor = _sigma2_floor(data)
    floored = False
    if sigma2 < floor:
        sigma2, floored = floor, True

    warnings = []
    filt = apply_backshift_filter(data, ARSpec(phi))
    ll = _loglik_from_residuals(filt.residuals(beta), sigma2, cfg.distribution, cfg.nu)
    trace = [IterationRecord(0, beta, phi, sigma2, ll)]
    converged = False
    it = 0
    for it in range(1, cfg.max_iter + 1):
        try:
            beta_new, phi_new, sigma2_new, r = ira_cycle(data, beta, phi, sigma2, cfg)
        except SingularSystemError as exc:
            raise FitError(f"iteration {it}: {exc}") from exc
        if sigma2_new < floor:
            sigma2_new, floored = floor, True
        delta = max(float(np.linalg.norm(beta_new - beta)),
                    float(np.linalg.norm(phi_new - phi)) if p else 0.0,
                    abs(sigma2_new - sigma2))
        ll_new = _loglik_from_residuals(r, sigma2_new, cfg.distribution, cfg.nu)
        if ll_new < ll - ASCENT_SLACK:
            warnings.append(f"log-likelihood decreased at iteration {it} "
                            f"by {ll - ll_new:.3g}")
        beta, phi, sigma2, ll = beta_new, phi_new, sigma2_new, ll_new
        trace.append(IterationRecord(it, beta, phi, sigma2, ll))
        if not np.isfinite(delta):
            raise FitError(f"iteration {it}: non-finite parameter update")
        if delta < cfg.tol:
            converged = True
            break

    if not converged:
        warnings.append(f"no convergence within {cfg.max_iter} iterations")
    if floored:
        warnings.append("sigma2 hit its lower bound; the fit is (near) exact")
    stationary = check_stationarity(ARSpec(phi))
    if not stationary:
        warnings.append("estimated AR coefficients are not stationary")
    return _assemble(data, cfg, beta, phi, sigma2, it, converged, stationary,
                     floored, trace, warnings)


def _assemble(data, cfg, beta, phi, sigma2, iterations, converged, stationary,
              floored, trace, warnings):
    p = cfg.p
    params = ParameterSet(beta, ARSpec(phi), sigma2)
    filt = apply_backshift_filter(data, params.ar)
    r = filt.residuals(beta)
    n_eff = r.shape[0]
    e = raw_residuals(data, beta)
    if cfg.distribution == "t":
        w = kernels.t_weights(r, sigma2, cfg.nu)
        cross = build_cross_products(e, p, w)
        fisher = fisher_t(filt, w, cross, sigma2, n_eff)
    else:
        w = np.ones(n_eff)
        cross = build_cross_products(e, p)
        fisher = fisher_normal(filt, cross, sigma2, n_eff)
    ll = _loglik_from_residuals(r, sigma2, cfg.distribution, cfg.nu)
    k = data.M + p + 1
    aic, bic = information_criteria(ll, k, n_eff)
    try:
        se = standard_errors(fisher)
    except SingularSystemError as exc:
        warnings.append(f"standard errors unavailable: singular {exc.step} block")
        se = np.full(k, np.nan)
    point = np.concatenate([beta, phi, [math.sqrt(sigma2)]])
    ci = [confidence_interval(float(v), float(s) if np.isfinite(s) else 0.0, cfg.level)
          for v, s in zip(point, se)]
    if not np.isfinite(se).all():
        ci = [type(iv)(iv.point, float("nan"), float("nan"), float("nan"), iv.level)
              for iv in ci]
    names = tuple(data.names) + tuple(f"phi_{l}" for l in range(1, p + 1)) + ("sigma",)
    for msg in warnings:
        logger.debug("fit warning: %s", msg)
    return FitResult(params=params, weights=w, loglik=ll, fisher=fisher, se=se, ci=ci,
                     aic=aic, bic=bic, iterations=iterations, converged=converged,
                     stationary=stationary, names=names, distribution=cfg.distribution,
                     nu=cfg.nu, n_eff=n_eff, level=cfg.level, sigma2_floored=floored,
                     trace=trace, warnings=warnings)
