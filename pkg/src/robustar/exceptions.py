"""Exception hierarchy for robustar."""


class RobustARError(Exception):
    """Base class for all package errors."""


class DimensionError(RobustARError, ValueError):
    """Array shapes do not agree."""


class OrderTooLargeError(RobustARError, ValueError):
    """AR order is too large for the available sample."""


class SingularSystemError(RobustARError, ArithmeticError):
    """A linear system is singular or numerically ill-conditioned.

    ``step`` names the part of the computation that failed (e.g.
    ``"beta-update"`` or the Fisher block ``"phi"``).
    """

    def __init__(self, step, cond=None):
        self.step = step
        self.cond = cond
        msg = f"singular system in {step}"
        if cond is not None:
            msg += f" (condition number {cond:.3g})"
        super().__init__(msg)


class FitError(RobustARError):
    """Estimation aborted."""
