"""Exception hierarchy shared by all engine modules."""


class UrbanLensError(Exception):
    """Base class for all engine errors."""


class InvalidGeometryError(UrbanLensError, ValueError):
    """Geometry violates a structural invariant (degenerate ring, bad mesh, ...)."""


class InvalidArgumentError(UrbanLensError, ValueError):
    """A parameter is outside its documented domain."""


class OutOfBoundsError(UrbanLensError, ValueError):
    """A coordinate falls outside the terrain extent or grid interior."""


class NotFoundError(UrbanLensError, KeyError):
    """Referenced id does not exist."""

    def __str__(self) -> str:  # KeyError quotes its message otherwise
        return self.args[0] if self.args else ""


class ConflictError(UrbanLensError, ValueError):
    """An id already exists where a fresh one is required."""


class InsufficientDataError(UrbanLensError, ValueError):
    """Not enough samples to run the computation."""


class EmptyPopulationError(UrbanLensError, ValueError):
    """Composition requested for a record with zero population."""


class InconsistentRecordError(UrbanLensError, ValueError):
    """Record bins do not sum to the declared population."""


class SceneSyntaxError(UrbanLensError, ValueError):
    """Scene document failed to parse; carries line/column position."""

    def __init__(self, message: str, line: int | None = None, column: int | None = None):
        super().__init__(message)
        self.line = line
        self.column = column


class ValidationError(UrbanLensError, ValueError):
    """One or more invariant violations; carries the full list."""

    def __init__(self, violations):
        self.violations = list(violations)
        lines = "; ".join(str(v) for v in self.violations)
        super().__init__(f"{len(self.violations)} violation(s): {lines}")
