"""Exception types shared across gevreylab."""


class GevreyLabError(Exception):
    """Base class for all library errors."""


class DimensionError(GevreyLabError, ValueError):
    """Operands live in different ambient dimensions or coefficient rings."""


class PreconditionError(GevreyLabError, ValueError):
    """An input violates a documented precondition."""


class StructuralError(GevreyLabError, KeyError):
    """A table entry needed by a graded computation is missing."""


class SolveError(GevreyLabError, ArithmeticError):
    """A coefficient recurrence hit a vanishing divisor.

    Attributes
    ----------
    i : int
        Component index (1-based).
    Q : tuple of int
        Multi-index of the offending coefficient.
    n : int
        Order (power of z or t) at which the divisor vanished.
    """

    def __init__(self, i, Q, n, detail=""):
        self.i = i
        self.Q = tuple(Q)
        self.n = n
        msg = f"zero divisor at component i={i}, Q={self.Q}, order n={n}"
        if detail:
            msg += f" ({detail})"
        super().__init__(msg)


class SummationDirectionError(GevreyLabError, ValueError):
    """Laplace integration is impossible along the requested ray.

    ``pole`` carries the offending Padé pole when the ray is blocked.
    """

    def __init__(self, msg, pole=None):
        self.pole = pole
        super().__init__(msg)


class FitDomainError(GevreyLabError, ValueError):
    """A fit was requested outside the domain where it is meaningful."""
