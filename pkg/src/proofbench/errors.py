"""Typed domain errors shared across the workbench.

Every error carries a stable ``name`` used by the CLI and HTTP layers, so
callers can match on it without parsing prose.
"""

from __future__ import annotations


class WorkbenchError(Exception):
    """Base class for all domain errors."""

    name = "WorkbenchError"

    def __str__(self) -> str:
        msg = super().__str__()
        return f"{self.name}: {msg}" if msg else self.name


class UnresolvableType(WorkbenchError):
    """A pointer parameter has no resolvable pointee size and no size hint."""

    name = "UnresolvableType"


class RenderRejected(WorkbenchError):
    """The harness spec failed validation; rendering refused."""

    name = "RenderRejected"

    def __init__(self, violations: list[str]):
        super().__init__("; ".join(violations))
        self.violations = list(violations)


class Inapplicable(WorkbenchError):
    """An intervention cannot be applied to the current harness spec."""

    name = "Inapplicable"


class BackendUnavailable(WorkbenchError):
    """The configured checker executable is missing or not runnable."""

    name = "BackendUnavailable"


class ScenarioMissing(WorkbenchError):
    """The mock backend has no stage matching the rendered harness."""

    name = "ScenarioMissing"


class ReportUnparseable(WorkbenchError):
    """Raw checker output could not be parsed into a report."""

    name = "ReportUnparseable"

    def __init__(self, offset: int, message: str):
        super().__init__(f"at byte {offset}: {message}")
        self.offset = offset
        self.message = message


class FrontEndFailure(WorkbenchError):
    """The checker front-end rejected the unit's sources."""

    name = "FrontEndFailure"

    def __init__(self, messages: list[str]):
        super().__init__("; ".join(messages))
        self.messages = list(messages)


class FunctionNotFound(WorkbenchError):
    """The requested entry function is not present in the unit."""

    name = "FunctionNotFound"


class NotApplicable(WorkbenchError):
    """A diagnosis routine was called on a report it does not apply to."""

    name = "NotApplicable"


class TraceMissing(WorkbenchError):
    """A violation diagnosis was requested for a property without a trace."""

    name = "TraceMissing"


class StaleRevision(WorkbenchError):
    """The session advanced past the revision the caller was looking at."""

    name = "StaleRevision"


class DegenerateInput(WorkbenchError):
    """Regression input has zero variance in a predictor."""

    name = "DegenerateInput"


class SessionNotFound(WorkbenchError):
    """No persisted session with the requested id."""

    name = "SessionNotFound"
