"""Error types shared across the crane lab packages."""

from typing import Any, Optional


class CraneLabError(Exception):
    """Base class for all domain errors raised by the lab."""


class OutOfReach(CraneLabError, ValueError):
    """An actuator extension or tip target lies outside the crane's workspace."""


class SingularConfiguration(CraneLabError, ArithmeticError):
    """The tip Jacobian is too ill-conditioned to invert."""

    def __init__(self, message: str, condition: float = float("inf")):
        super().__init__(message)
        self.condition = condition


class ConeSingularity(CraneLabError, ArithmeticError):
    """The cable angle phi_y reached the cos(phi_y) = 0 guard band."""


class BehindCamera(CraneLabError, ValueError):
    """A point projects with non-positive depth."""


class InsufficientViews(CraneLabError, ValueError):
    """Fewer than two valid cameras observed a marker."""


class DegenerateGeometry(CraneLabError, ArithmeticError):
    """The triangulation nullspace is not one-dimensional."""


class CoincidentMarkers(CraneLabError, ValueError):
    """The two triangulated markers are too close to define a direction."""


class IllConditionedInnovation(CraneLabError, ArithmeticError):
    """The innovation covariance of the Kalman update cannot be inverted reliably."""


class ScenarioConfigError(CraneLabError, ValueError):
    """A scenario or grid file holds an unknown key or an invalid value."""


class SimulationAborted(CraneLabError, RuntimeError):
    """A closed-loop run stopped early.

    Attributes:
    -----------
    trace : Trace or None
        Records collected up to the failing tick
    cause : Exception
        The domain error that stopped the run
    csv_path : str or None
        Where the partial trace was flushed, if anywhere
    """

    def __init__(
        self,
        message: str,
        trace: Any = None,
        cause: Optional[Exception] = None,
        csv_path: Optional[str] = None,
    ):
        super().__init__(message)
        self.trace = trace
        self.cause = cause
        self.csv_path = csv_path


class _NotConvergedType:
    """Marker stored in metric fields whose threshold was never met."""

    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self) -> str:
        return "NotConverged"

    def __str__(self) -> str:
        return "NotConverged"

    def __bool__(self) -> bool:
        return False

    def __reduce__(self):
        return (_NotConvergedType, ())


NotConverged = _NotConvergedType()


def is_not_converged(value: Any) -> bool:
    """Return True if a metric value is the NotConverged marker."""
    return value is NotConverged
