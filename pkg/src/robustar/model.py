"""Regression data model with AR(p) errors.

Time is 1-based in the documentation (t = 1..N, conditioning window
t = p+1..N); arrays are 0-based, so row ``k`` of any filtered quantity
corresponds to time ``t = k + p + 1``.
"""
from dataclasses import dataclass, field

import numpy as np

from . import kernels
from .exceptions import DimensionError, OrderTooLargeError

STATIONARITY_MARGIN = 1e-10


def _as_vector(a, name):
    v = np.array(a, dtype=np.float64, copy=True).reshape(-1)
    v.setflags(write=False)
    return v


@dataclass(frozen=True)
class RegressionDataset:
    """Response ``y`` (length N) and covariates ``X`` (N x M)."""

    y: np.ndarray
    X: np.ndarray
    has_intercept: bool = False
    names: tuple = ()

    def __post_init__(self):
        y = _as_vector(self.y, "y")
        X = np.array(self.X, dtype=np.float64, copy=True)
        if X.ndim == 1:
            X = X[:, None]
        if X.ndim != 2:
            raise DimensionError(f"X must be 2-D, got {X.ndim} dimensions")
        if X.shape[0] != y.shape[0]:
            raise DimensionError(f"y has {y.shape[0]} rows but X has {X.shape[0]}")
        if y.shape[0] < 2 or X.shape[1] < 1:
            raise DimensionError("need N >= 2 observations and M >= 1 covariates")
        if not (np.isfinite(y).all() and np.isfinite(X).all()):
            raise ValueError("data contain non-finite values")
        X.setflags(write=False)
        names = tuple(self.names) or tuple(f"beta_{i + 1}" for i in range(X.shape[1]))
        if len(names) != X.shape[1]:
            raise DimensionError(f"{len(names)} covariate names for {X.shape[1]} columns")
        object.__setattr__(self, "y", y)
        object.__setattr__(self, "X", X)
        object.__setattr__(self, "names", names)

    @property
    def N(self):
        return self.y.shape[0]

    @property
    def M(self):
        return self.X.shape[1]

    @classmethod
    def from_arrays(cls, y, X, intercept=False, names=()):
        """Build a dataset, optionally prepending a column of ones."""
        X = np.asarray(X, dtype=np.float64)
        if X.ndim == 1:
            X = X[:, None]
        if intercept:
            X = np.column_stack([np.ones(X.shape[0]), X])
            if names:
                names = ("beta_0",) + tuple(names)
        return cls(y, X, has_intercept=intercept, names=names)


@dataclass(frozen=True)
class ARSpec:
    """AR coefficients ``phi`` (length p)."""

    phi: np.ndarray = field(default_factory=lambda: np.zeros(0))

    def __post_init__(self):
        phi = _as_vector(self.phi, "phi")
        if not np.isfinite(phi).all():
            raise ValueError("AR coefficients must be finite")
        object.__setattr__(self, "phi", phi)

    @property
    def p(self):
        return self.phi.shape[0]


@dataclass(frozen=True)
class ParameterSet:
    beta: np.ndarray
    ar: ARSpec
    sigma2: float

    def __post_init__(self):
        beta = _as_vector(self.beta, "beta")
        if not np.isfinite(beta).all():
            raise ValueError("beta must be finite")
        if not isinstance(self.ar, ARSpec):
            object.__setattr__(self, "ar", ARSpec(self.ar))
        sigma2 = float(self.sigma2)
        if not (np.isfinite(sigma2) and sigma2 > 0):
            raise ValueError(f"sigma2 must be positive and finite, got {sigma2}")
        object.__setattr__(self, "beta", beta)
        object.__setattr__(self, "sigma2", sigma2)

    @property
    def phi(self):
        return self.ar.phi

    @property
    def p(self):
        return self.ar.p

    def as_vector(self):
        """Stack ``(beta, phi, sigma2)`` into one array."""
        return np.concatenate([self.beta, self.phi, [self.sigma2]])


@dataclass(frozen=True)
class FilteredDataset:
    """``Phi(B)`` applied to y and X over t = p+1..N, plus the lag blocks.

    ``lag_y[k, l-1] = y[t-l]`` and ``lag_X[k, l-1, i] = X[t-l, i]`` for the
    time ``t`` of row ``k``.
    """

    fy: np.ndarray
    fX: np.ndarray
    lag_y: np.ndarray
    lag_X: np.ndarray
    phi: np.ndarray

    @property
    def n_eff(self):
        return self.fy.shape[0]

    @property
    def p(self):
        return self.phi.shape[0]

    def residuals(self, beta):
        """Filtered residuals ``Phi(B)y_t - sum_i beta_i Phi(B)x_{t,i}``."""
        beta = np.asarray(beta, dtype=np.float64)
        if beta.shape != (self.fX.shape[1],):
            raise DimensionError(f"beta has shape {beta.shape}, expected ({self.fX.shape[1]},)")
        return self.fy - self.fX @ beta


def _readonly(*arrays):
    for a in arrays:
        a.setflags(write=False)


def apply_backshift_filter(data, ar):
    """Filter the response and every covariate column by ``Phi(B)``.

    Raises
    ------
    OrderTooLargeError
        If ``p >= N``.
    """
    if not isinstance(ar, ARSpec):
        ar = ARSpec(ar)
    p, n = ar.p, data.N
    if p >= n:
        raise OrderTooLargeError(f"AR order {p} needs more than {n} observations")
    fy, fX = kernels.backshift_filter(data.y, data.X, ar.phi)
    lag_y = np.empty((n - p, p))
    lag_X = np.empty((n - p, p, data.M))
    for l in range(1, p + 1):
        lag_y[:, l - 1] = data.y[p - l:n - l]
        lag_X[:, l - 1, :] = data.X[p - l:n - l]
    _readonly(fy, fX, lag_y, lag_X)
    return FilteredDataset(fy=fy, fX=fX, lag_y=lag_y, lag_X=lag_X, phi=ar.phi)


def raw_residuals(data, beta):
    """Unfiltered residuals ``e_t = y_t - sum_i beta_i x_{t,i}`` for t = 1..N."""
    beta = np.asarray(beta, dtype=np.float64).reshape(-1)
    if beta.shape[0] != data.M:
        raise DimensionError(f"beta has length {beta.shape[0]}, data has M={data.M}")
    return data.y - data.X @ beta


def ar_roots(phi):
    """Roots of ``1 - phi_1 z - ... - phi_p z^p``, via the companion matrix."""
    phi = np.asarray(phi, dtype=np.float64).reshape(-1)
    # trailing zero coefficients lower the polynomial degree
    nz = np.flatnonzero(phi)
    if nz.size == 0:
        return np.zeros(0, dtype=complex)
    phi = phi[:nz[-1] + 1]
    p = phi.shape[0]
    companion = np.zeros((p, p))
    companion[0, :] = phi
    companion[1:, :-1] = np.eye(p - 1)
    # eigenvalues lambda are reciprocals of the polynomial roots
    lam = np.linalg.eigvals(companion)
    return 1.0 / lam


def check_stationarity(ar):
    """True iff every characteristic root lies outside the unit circle."""
    phi = ar.phi if isinstance(ar, ARSpec) else np.asarray(ar, dtype=np.float64)
    roots = ar_roots(phi)
    return bool(np.all(np.abs(roots) > 1.0 + STATIONARITY_MARGIN))
