"""Exception types raised by the solvers and the reconstruction loop."""


class GridMismatchError(ValueError):
    """Two fields (or a field and a grid) have incompatible shapes."""


class PreconditionError(ValueError):
    """An operation was called outside the regime it is defined for."""


class SolverInstabilityError(FloatingPointError):
    """A time-marching solve produced non-finite values.

    Attributes
    ----------
    step : int
        Index of the first time level that contains a non-finite value.
    """

    def __init__(self, step, what="forward"):
        self.step = step
        self.what = what
        super().__init__(f"{what} solve produced non-finite values at time step {step}")


class NullSpaceDirectionError(ArithmeticError):
    """The input-output map sends a nonzero descent direction to zero."""
