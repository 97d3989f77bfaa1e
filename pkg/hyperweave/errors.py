"""Exception hierarchy for hyperweave."""


class HyperweaveError(Exception):
    """Base class for every error raised by hyperweave."""


class HGTParseError(HyperweaveError, ValueError):
    """
    Malformed HGT v1 input.

    Attributes:
        line_number: 1-based line of the offending input line.
    """

    def __init__(self, line_number: int, message: str):
        super().__init__(f"line {line_number}: {message}")
        self.line_number = line_number


class InvalidEdgeError(HyperweaveError, ValueError):
    """A hyperedge or an edge index violates the hypergraph invariants."""


class UndefinedMetricError(HyperweaveError, ValueError):
    """A pattern statistic is not defined for the given hypergraph."""


class FitUndefinedError(UndefinedMetricError):
    """A power-law fit or fit score cannot be computed."""


class EligibleSetError(HyperweaveError, ValueError):
    """Too few nodes pass the quality filter."""


class InsufficientDataError(HyperweaveError, ValueError):
    """A verification was asked to run on too small a sample."""


class TemplateError(HyperweaveError, ValueError):
    """
    A prompt context is missing a field the template needs.

    Attributes:
        field: Name of the missing context field.
    """

    def __init__(self, field: str, message: str = ""):
        super().__init__(message or f"missing context field: {field}")
        self.field = field


class ResponseParseError(HyperweaveError, ValueError):
    """An agent response could not be turned into a structured result."""


class BackendError(HyperweaveError):
    """Base class for chat backend failures."""


class CredentialError(BackendError):
    """Missing or rejected credential. Never retried."""


class TransportError(BackendError):
    """Request failed for good: retry budget exhausted or non-retryable status."""


class ProtocolError(BackendError):
    """The endpoint answered with a body that is not a chat completion."""


class ConstructionAborted(HyperweaveError):
    """
    Construction stopped on a backend failure.

    Attributes:
        partial: Hypergraph built before the failure.
        attempt: 0-based attempt index at which the failure happened.
    """

    def __init__(self, partial, attempt: int, cause: Exception):
        super().__init__(f"construction aborted at attempt {attempt}: {cause}")
        self.partial = partial
        self.attempt = attempt


class EvolutionStepError(HyperweaveError):
    """
    An evolution step failed and was rolled back.

    Attributes:
        step: 1-based index of the failed step.
    """

    def __init__(self, step: int, cause: Exception):
        super().__init__(f"evolution step {step} failed: {cause}")
        self.step = step


class PlotSpecError(HyperweaveError, ValueError):
    """A plot specification cannot be rendered."""


class ConfigError(HyperweaveError, ValueError):
    """Configuration is unreadable, incomplete or out of bounds."""
