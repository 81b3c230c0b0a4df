"""Exception hierarchy. CLI maps PreconditionError to exit 2, InconclusiveError to exit 3."""


class FmlatError(Exception):
    pass


class PreconditionError(FmlatError):
    """Input violates a documented precondition."""


class ExpressionError(PreconditionError):
    """Lattice expression rejected; carries the offending position."""

    def __init__(self, message, position=None):
        self.position = position
        if position is not None:
            message = f"{message} (at position {position})"
        super().__init__(message)


class UnsupportedLatticeError(PreconditionError):
    """Lattice shape outside the supported classes of an operation."""


class SubgroupClosureError(PreconditionError):
    """A claimed subgroup is not closed under the group operations."""


class InconclusiveError(FmlatError):
    """A bounded search or enumeration hit its cap before deciding."""
