"""Exception hierarchy shared by all modules."""


class QWError(Exception):
    """Base class for package errors."""


class ContractError(QWError, ValueError):
    """Invalid parameters or a violated domain invariant."""


class PrecisionError(QWError, ArithmeticError):
    """A numerical contract could not be met (drift, non-convergence)."""


class TruncationError(PrecisionError):
    """Probability mass leaked outside the computational window."""


class ResourceError(QWError, RuntimeError):
    """Requested problem size exceeds a memory/time bound."""
