"""Exception types raised across the package."""


class ConewaveError(Exception):
    """Base class for all package errors."""


class DomainError(ConewaveError, ValueError):
    """Argument outside the supported domain of an evaluator."""


class PositivityViolation(ConewaveError, ValueError):
    """Some cross-section eigenvalue has lambda + (n-2)^2/4 <= 0."""


class ConvergenceError(ConewaveError, RuntimeError):
    """A truncation did not settle within its tolerance."""


class UnsupportedEvaluation(ConewaveError, TypeError):
    """Point evaluation requested on a model that has no eigenfunctions."""


class TailNotConverged(ConewaveError, RuntimeError):
    """Kernel series tail bound is too large relative to the partial sum."""

    def __init__(self, message, partial=None, tail=None):
        super().__init__(message)
        self.partial = partial
        self.tail = tail


class NonAdmissiblePair(ConewaveError, ValueError):
    """(q, r) does not satisfy 2/q + n/r = n/2 with q >= 2."""


class BetaOutOfRange(ConewaveError, ValueError):
    """Power weight exponent outside 1/2 < beta < 1 + nu0."""


class SOutOfRange(ConewaveError, ValueError):
    """Hardy exponent outside 0 < s < min(1 + nu0, 2)."""


class POutOfRange(ConewaveError, ValueError):
    """Lebesgue exponent outside the admissible Hardy window."""


class SigmaOnSpectrum(ConewaveError, ValueError):
    """Spectral parameter too close to the positive real axis."""


class FitUnstable(ConewaveError, RuntimeError):
    """Log-log fit residual exceeds the accepted threshold."""


class StepTooLarge(ConewaveError, ValueError):
    """Time step does not resolve the fastest retained phase."""


class BlowupSuspected(ConewaveError, RuntimeError):
    """H1 norm grew beyond the guard factor during an evolution."""


class ParseError(ConewaveError, ValueError):
    """Malformed experiment configuration text."""


class UnknownKey(ConewaveError, KeyError):
    """Configuration key not recognised for its section."""

    def __str__(self):
        return str(self.args[0]) if self.args else ""


class ConstraintViolation(ConewaveError, ValueError):
    """Configuration value violates a hypothesis or range constraint."""
