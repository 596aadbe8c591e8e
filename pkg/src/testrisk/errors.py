"""Exception hierarchy shared by every module.

Each error carries a stable machine-readable ``code`` (used verbatim in CLI
diagnostics and HTTP error bodies) and an optional ``location`` pointing at
the offending field, row, or override path.
"""

from __future__ import annotations


class TestRiskError(Exception):
    """Base class for all domain errors."""

    code = "error"

    def __init__(self, message: str, location: str | None = None):
        super().__init__(message)
        self.message = message
        self.location = location

    def to_jsonable(self) -> dict:
        body = {"error": self.code, "message": self.message}
        if self.location is not None:
            body["location"] = self.location
        return body


class InvalidSizeError(TestRiskError):
    code = "invalid-size"


class InvalidParamsError(TestRiskError):
    code = "invalid-params"


class DreOutOfRangeError(TestRiskError):
    code = "dre-out-of-range"


class InvalidPlanError(TestRiskError):
    code = "invalid-plan"


class MonotonicityError(TestRiskError):
    code = "monotonicity-violation"


class DuplicateNameError(TestRiskError):
    code = "duplicate-name"


class NoDefectsError(TestRiskError):
    code = "no-defects"


class UnknownPhaseError(TestRiskError):
    code = "unknown-phase"


class EmptyHistoryError(TestRiskError):
    code = "empty-history"


class NoUsableHistoryError(TestRiskError):
    code = "no-usable-history"


class ZeroRateError(TestRiskError):
    code = "zero-rate"


class ZeroConstraintError(TestRiskError):
    code = "zero-constraint"


class InvalidProfileError(TestRiskError):
    code = "invalid-profile"


class BadOverridePathError(TestRiskError):
    code = "bad-override-path"


class InvariantViolationError(TestRiskError):
    code = "invariant-violation"


class ParseError(TestRiskError):
    code = "parse-error"


class SchemaError(TestRiskError):
    code = "schema-error"


class MismatchedLaddersError(TestRiskError):
    code = "mismatched-ladders"
