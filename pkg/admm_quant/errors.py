"""
Exceptions
==========

Every failure raised by the library derives from :class:`AdmmQuantError`, so
callers (the CLI and the sweep runner in particular) can catch the whole family
in one place and map it to an exit code or a diverged-run record.
"""

from typing import Any, Optional


class AdmmQuantError(Exception):
    """Base class for all library errors"""


class DimensionMismatchError(AdmmQuantError, ValueError):
    """Vector or matrix dimensions do not agree"""

    def __init__(self, expected: int, got: int, what: str = "vector"):
        super().__init__(f"{what} has dimension {got}, expected {expected}")
        self.expected = expected
        self.got = got


class NonFiniteInputError(AdmmQuantError, ValueError):
    """NaN or infinite entries where finite values are required"""


class InvalidSetError(AdmmQuantError, ValueError):
    """Malformed coordinate set description"""


class UnboundedSetError(AdmmQuantError):
    """Enumeration requested over a set with an unbounded coordinate"""


class CardinalityExceededError(AdmmQuantError):
    """Product set has more members than the enumeration limit allows"""

    def __init__(self, cardinality: float, limit: int):
        super().__init__(f"set has {cardinality:.0f} members, limit is {limit}")
        self.cardinality = cardinality
        self.limit = limit


class InvalidConfigError(AdmmQuantError, ValueError):
    """Solver, instance or protocol parameters out of range"""


class InvalidPointError(AdmmQuantError, ValueError):
    """A point expected to lie in the discrete set does not"""


class LinearSolveError(AdmmQuantError):
    """The x-update system is not symmetric positive definite (rho <= mu)"""


class InnerSolverError(AdmmQuantError):
    """Inner gradient descent hit its iteration cap before accepting a point"""

    def __init__(self, message: str, iterations: int, grad_norm: float):
        super().__init__(message)
        self.iterations = iterations
        self.grad_norm = grad_norm


class EigenSolverError(AdmmQuantError):
    """Symmetric eigen-decomposition failed to converge"""


class DivergenceError(AdmmQuantError):
    """A non-finite value appeared in an iterate"""

    def __init__(self, method: str, iteration: int, state: Optional[Any] = None):
        super().__init__(f"{method} diverged at iteration {iteration}")
        self.method = method
        self.iteration = iteration
        self.state = state


class MismatchedRunsError(AdmmQuantError, ValueError):
    """Two result sets do not cover the same (instance, init) pairs"""
