"""Semantic exception hierarchy shared across the library."""


class AuditLabError(Exception):
    """Base class for all library errors."""


class DomainError(AuditLabError, ValueError):
    """An argument lies outside the mathematical domain of an operation."""


class ParamOutOfSet(DomainError):
    """A natural parameter lies outside the family's parameter set."""


class StreamExhausted(AuditLabError):
    """A finite Bernoulli stream ended before enough successes were seen."""


class DegenerateData(AuditLabError):
    """Training data cannot support the requested fit."""


class DegenerateMoments(DomainError):
    """Sample moments fall outside the family's moment range."""


class IllPosed(AuditLabError):
    """A population quantity is undefined (some q_{y,a} = 0)."""


class AccessError(AuditLabError):
    """Hidden field of an individual read before the matching reveal."""


class InsufficientHistory(AuditLabError):
    """Past database exhausted before the stopping count was reached."""


class InsufficientSamples(AuditLabError):
    """Truncated-sample cell too small for the configured estimation run."""


class NoMajorityCandidate(AuditLabError):
    """No estimation candidate is close to more than half of the others."""


class AcceptanceFailure(AuditLabError):
    """Rejection sampler hit its attempt cap without a single acceptance."""


class InfeasibleIntersection(AuditLabError):
    """Alternating projection failed to reach the intersection of two sets."""


class SchemaError(AuditLabError, ValueError):
    """An input table does not match the expected column schema."""


class RowError(AuditLabError, ValueError):
    """A row of an input table failed to parse or violated a range."""

    def __init__(self, line: int, message: str):
        super().__init__(f"line {line}: {message}")
        self.line = line


class ConfigError(AuditLabError, ValueError):
    """An experiment configuration failed validation."""
