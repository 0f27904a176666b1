"""Standard errors, confidence intervals and information criteria."""
import math
from dataclasses import dataclass
from statistics import NormalDist

import numpy as np

from ._linalg import inverse_symmetric
from .exceptions import SingularSystemError


@dataclass(frozen=True)
class IntervalEstimate:
    point: float
    se: float
    lower: float
    upper: float
    level: float


def standard_errors(fisher):
    """Square roots of the diagonal of the blockwise inverse of ``fisher``.

    Raises
    ------
    SingularSystemError
        With ``step`` set to ``"beta"``, ``"phi"`` or ``"sigma"``.
    """
    se_beta = np.sqrt(np.diag(inverse_symmetric(fisher.beta, "beta")))
    se_phi = np.sqrt(np.diag(inverse_symmetric(fisher.phi, "phi")))
    if not (math.isfinite(fisher.sigma) and fisher.sigma > 0):
        raise SingularSystemError("sigma")
    return np.concatenate([se_beta, se_phi, [1.0 / math.sqrt(fisher.sigma)]])


def z_quantile(level):
    if not 0.0 < level < 1.0:
        raise ValueError(f"confidence level must lie in (0, 1), got {level}")
    return NormalDist().inv_cdf((1.0 + level) / 2.0)


def confidence_interval(point, se, level=0.95):
    """Normal-theory interval ``point +/- z * se``."""
    if se < 0:
        raise ValueError(f"standard error must be non-negative, got {se}")
    half = z_quantile(level) * se
    return IntervalEstimate(point=point, se=se, lower=point - half,
                            upper=point + half, level=level)


def information_criteria(loglik, n_params, n_eff):
    """Return ``(aic, bic)`` for ``n_params`` estimated parameters."""
    if n_eff < 1:
        raise ValueError(f"effective sample size must be >= 1, got {n_eff}")
    aic = -2.0 * loglik + 2.0 * n_params
    bic = -2.0 * loglik + n_params * math.log(n_eff)
    return aic, bic
