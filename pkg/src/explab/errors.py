"""Exception types shared across the package."""


class ExplabError(Exception):
    """Base class for package-specific failures."""


class DomainMismatchError(ExplabError, ValueError):
    """Operands live on different domains, or a region leaves the density support."""


class UnsupportedClassError(ExplabError, ValueError):
    """Operation is not defined for this hypothesis-class kind."""


class ResourceLimitError(ExplabError, RuntimeError):
    """An enumeration would exceed the configured size limit."""


class AssumptionViolationError(ExplabError, ValueError):
    """A precondition of the rate analysis does not hold for this scenario."""


class PartitionError(ExplabError, RuntimeError):
    """A hypothesis could not be assigned to any region; indicates a bug."""


class NumericalError(ExplabError, RuntimeError):
    """An iterative solve failed to converge."""
