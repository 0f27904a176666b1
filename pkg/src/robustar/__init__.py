"""Linear regression with AR(p) errors under normal or Student-t innovations.

Estimation is by conditional maximum likelihood, computed with an
iteratively reweighted algorithm; the t fit downweights observations with
large filtered residuals.
"""
from .exceptions import (DimensionError, FitError, OrderTooLargeError,
                         RobustARError, SingularSystemError)
from .inference import confidence_interval, information_criteria, standard_errors
from .kernels import BACKEND
from .model import (ARSpec, FilteredDataset, ParameterSet, RegressionDataset,
                    apply_backshift_filter, check_stationarity, raw_residuals)
from .normal_cml import cond_loglik_normal, score_normal
from .simulation import Innovation, StudyDesign, StudyReport, run_study
from .solver import FitResult, SolverConfig, fit, initial_values
from .t_cml import TConfig, cond_loglik_t, score_t

__version__ = "0.1.0"

__all__ = [
    "ARSpec", "BACKEND", "DimensionError", "FilteredDataset", "FitError", "FitResult",
    "Innovation", "OrderTooLargeError", "ParameterSet", "RegressionDataset",
    "RobustARError", "SingularSystemError", "SolverConfig", "StudyDesign", "StudyReport",
    "TConfig", "apply_backshift_filter", "check_stationarity", "cond_loglik_normal",
    "cond_loglik_t", "confidence_interval", "fit", "information_criteria",
    "initial_values", "raw_residuals", "run_study", "score_normal", "score_t",
    "standard_errors",
]
