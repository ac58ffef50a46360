"""Exception types shared across the package."""


class ExactPenError(Exception):
    """Base class for all errors raised by this package."""


class ShapeError(ExactPenError, ValueError):
    """Array dimensions do not match the owning instance."""


class DomainError(ExactPenError, ValueError):
    """Input lies outside the domain an operation requires."""


class SchemaError(ExactPenError, ValueError):
    """A serialized document violates the instance/report schema."""


class BudgetExceededError(ExactPenError, RuntimeError):
    """An enumeration would exceed its configured budget."""


class LatticeInfeasibleError(ExactPenError, RuntimeError):
    """No complementary vertex tuple exists on the lattice."""


class LpError(ExactPenError, RuntimeError):
    """A linear program failed where the model guarantees it cannot."""
