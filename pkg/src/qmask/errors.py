"""Exception hierarchy. Every domain error derives from :class:`QMaskError`."""


class QMaskError(Exception):
    """Base class for domain errors (the CLI maps these to exit code 1)."""


class InvalidStateError(QMaskError, ValueError):
    """An operator, POVM or hybrid state violates one of its invariants."""

    def __init__(self, message, report=None):
        super().__init__(message)
        self.report = list(report or [])


class RegisterError(QMaskError, KeyError):
    """Unknown, duplicated or overlapping register names."""

    def __str__(self):
        return str(self.args[0]) if self.args else ""


class DimensionError(QMaskError, ValueError):
    """Operator or register dimensions do not line up."""


class SizeLimitError(QMaskError, ValueError):
    """A configured size cap (block length, codebook, enumeration) was exceeded."""


class SpecError(QMaskError, ValueError):
    """A channel or strategy JSON document is malformed."""


class InfeasibleBudgetError(QMaskError, ValueError):
    """No strategy found meets the requested leakage budget."""
