"""
Exception hierarchy for the disclosure-equilibrium engine.

Every error raised on purpose by the library derives from DisclosureError, so
callers (the CLI, the HTTP service) can map whole families of failures onto
exit codes or status codes without string matching.
"""


class DisclosureError(Exception):
    """Base class for all deliberate failures of the engine."""


class DomainError(DisclosureError, ValueError):
    """An argument lies outside the domain of the operation."""


class EmptyEventError(DomainError):
    """A conditional expectation was requested on a zero-probability event."""


class UndefinedTransformError(DomainError):
    """The posterior transform is undefined for the given interim beliefs."""


class ConfigError(DisclosureError, ValueError):
    """A configuration, model table or game specification is invalid."""


class DegenerateCurveError(ConfigError):
    """A target nondisclosure curve is flat, so no informed sender can produce it."""


class InvalidCurveError(ConfigError):
    """A target nondisclosure curve breaks the sign condition sign[s - psi] = sign[psi']."""


class ConvergenceError(DisclosureError, RuntimeError):
    """An iterative solver hit its iteration cap, or two independent
    evaluations of the same quantity disagree.

    `trace` holds the iterates visited, oldest first, so the caller can see
    whether the sequence was still moving or cycling.
    """

    def __init__(self, message, trace=None):
        super().__init__(message)
        self.trace = list(trace) if trace is not None else []


class BoundaryNotSupportedError(DisclosureError):
    """The solver only handles interior thresholds and none exists."""


class MonotonicityError(DisclosureError, AssertionError):
    """A sweep violated a comparative-statics direction by more than the noise band."""


class GoldenMismatchError(DisclosureError, AssertionError):
    """A reproduced worked-example number differs from its published value."""

    def __init__(self, example, message):
        super().__init__(f"{example}: {message}")
        self.example = example
