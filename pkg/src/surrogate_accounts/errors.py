"""Exception hierarchy. Each class carries the CLI exit code it maps to."""

from __future__ import annotations


class SurrogateError(Exception):
    exit_code = 1


class FormatError(SurrogateError):
    """Input could not be parsed, or it has unknown or missing fields."""

    exit_code = 2


class UnknownPredicateError(SurrogateError):
    exit_code = 3

    def __init__(self, name: str, context: str = ""):
        self.name = name
        where = f" ({context})" if context else ""
        super().__init__(f"unknown privilege predicate {name!r}{where}")


class ValidationError(SurrogateError):
    exit_code = 4


class CorrespondenceError(SurrogateError):
    """An account does not line up with the original graph it claims to protect."""

    exit_code = 5


class InfeasibleSpecError(SurrogateError):
    exit_code = 6
