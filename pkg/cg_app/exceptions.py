"""
Exception hierarchy for the cgSpan app.

Management commands map these onto exit codes: ValidationFailed -> 1,
everything else raised for bad input or configuration -> 2.
"""


class CGSpanError(Exception):
    """Base class for every error raised by cg_app."""


class ParseError(CGSpanError):
    """A document could not be parsed or does not match its schema."""

    def __init__(self, message, line=None, column=None):
        self.line = line
        self.column = column
        if line is not None:
            message = f"{message} (line {line}, column {column})"
        super().__init__(message)


class VocabularyError(ParseError):
    """The vocabulary breaks one of its invariants."""


class GraphError(ParseError):
    """A conceptual graph references unknown nodes or repeats node ids."""


class RuleError(ParseError):
    """A lambda-rule is malformed."""


class UnknownTypeError(CGSpanError, KeyError):
    """A concept or relation type is not declared in the vocabulary."""

    def __str__(self):
        return Exception.__str__(self)


class FormalismViolation(CGSpanError):
    """Input data contradicts the vocabulary (e.g. a signature type missing from a path)."""


class RuleApplicationError(CGSpanError):
    """A specialization rule cannot be applied to a matched node."""


class DisconnectedPatternError(CGSpanError):
    """A canonical code was requested for a disconnected graph."""


class InternalInvariantError(CGSpanError):
    """An internal consistency check failed; indicates a bug, not bad input."""


class ConfigError(CGSpanError):
    """A configuration value is invalid."""


class ValidationFailed(CGSpanError):
    """A database does not validate against its vocabulary."""

    def __init__(self, violations):
        self.violations = list(violations)
        super().__init__(f"{len(self.violations)} validation violation(s)")


class EvaluationError(CGSpanError):
    """A metric is undefined for the given inputs."""
