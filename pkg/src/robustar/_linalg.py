import numpy as np

from .exceptions import SingularSystemError

COND_LIMIT = 1e12


def solve_symmetric(A, b, step):
    """Solve ``A x = b`` through an SVD, refusing when cond(A) > COND_LIMIT."""
    A = np.asarray(A, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    if A.shape[0] == 0:
        return np.zeros(b.shape)
    try:
        U, s, Vt = np.linalg.svd(A)
    except np.linalg.LinAlgError:
        raise SingularSystemError(step) from None
    if not np.isfinite(s).all() or s[-1] <= 0.0 or s[0] / s[-1] > COND_LIMIT:
        cond = np.inf if s[-1] <= 0.0 else s[0] / s[-1]
        raise SingularSystemError(step, cond)
    coef = U.T @ b
    coef = coef / (s[:, None] if coef.ndim == 2 else s)
    return Vt.T @ coef


def inverse_symmetric(A, step):
    A = np.asarray(A, dtype=np.float64)
    return solve_symmetric(A, np.eye(A.shape[0]), step)
