"""Error types and diagnostics shared across the pipeline.

Every error carries a stable machine-readable ``code`` (used by the CLI for
exit codes and by the HTTP API for response payloads).
"""
from __future__ import annotations

from dataclasses import dataclass


@dataclass(frozen=True)
class Diagnostic:
    """One validation finding: ``severity`` is ``error`` or ``warning``."""

    severity: str
    code: str
    message: str
    subject: str | None = None

    def to_dict(self) -> dict:
        d = {"severity": self.severity, "code": self.code, "message": self.message}
        if self.subject is not None:
            d["subject"] = self.subject
        return d


class CollabflowError(Exception):
    code = "error"
    exit_code = 1


class UnknownConcept(CollabflowError):
    code = "unknown-concept"
    exit_code = 3


class UnknownPredicate(CollabflowError):
    code = "unknown-predicate"
    exit_code = 3


class UnknownInstance(CollabflowError):
    code = "unknown-instance"
    exit_code = 3


class DuplicateInstance(CollabflowError):
    code = "duplicate-instance"
    exit_code = 3


class DomainRangeViolation(CollabflowError):
    code = "domain-range-violation"
    exit_code = 3


class EmptySeparator(CollabflowError):
    code = "empty-separator"
    exit_code = 2


class EmptyNeedle(CollabflowError):
    code = "empty-needle"
    exit_code = 2


class MalformedRule(CollabflowError):
    code = "malformed-rule"
    exit_code = 1


class IterationCap(CollabflowError):
    """Deduction exceeded the safety cap; signals a rule-set bug."""

    code = "iteration-cap"
    exit_code = 1


class ParseError(CollabflowError):
    code = "parse-error"
    exit_code = 2


class BrokenReference(CollabflowError):
    code = "broken-reference"
    exit_code = 3


class ValidationError(CollabflowError):
    code = "validation-error"
    exit_code = 2

    def __init__(self, message: str, diagnostics: list[Diagnostic] | None = None):
        super().__init__(message)
        self.diagnostics = diagnostics or []


class UnknownRole(CollabflowError):
    code = "unknown-role"
    exit_code = 3


class UnknownAbstractService(CollabflowError):
    code = "unknown-abstract-service"
    exit_code = 3


class MalformedQuery(CollabflowError):
    code = "malformed-query"
    exit_code = 2


class NoDependencies(CollabflowError):
    """The deduced knowledge contains nothing to mediate."""

    code = "no-dependencies"
    exit_code = 4


class UnknownGateway(CollabflowError):
    code = "unknown-gateway"
    exit_code = 3


class UnsupportedType(CollabflowError):
    code = "unsupported-type"
    exit_code = 2


class IncompleteProcess(CollabflowError):
    code = "incomplete-process"
    exit_code = 5

    def __init__(self, message: str, diagnostics: list[Diagnostic] | None = None):
        super().__init__(message)
        self.diagnostics = diagnostics or []


class UnknownProject(CollabflowError):
    code = "unknown-project"
    exit_code = 3


class ProjectStateError(CollabflowError):
    """Operation not allowed in the project's current lifecycle status."""

    code = "wrong-status"
    exit_code = 4
