"""Typed errors shared across the package.

Every failure mode the engine has to handle (retry, degrade, report) maps to
one of these classes; adapters and services never let raw transport errors
escape.
"""

from __future__ import annotations


class StudiomeetError(Exception):
    """Base class for all package errors."""


# --- domain ---------------------------------------------------------------


class UnknownArtifactKind(StudiomeetError):
    """Asked to validate or build an artifact kind this package does not know."""


# --- meeting engine -------------------------------------------------------


class EmptyRoster(StudiomeetError):
    """A meeting needs at least one role card."""


class MissingCoreRole(StudiomeetError):
    """Roster lacks a role (or its stage skill) that the SOP assigns work to."""


class InvalidForm(StudiomeetError):
    """Requirement form failed validation; carries the violation list."""

    def __init__(self, violations):
        super().__init__("; ".join(violations))
        self.violations = list(violations)


class MeetingCompleted(StudiomeetError):
    """Operation not allowed on a completed meeting."""


class BudgetExhausted(StudiomeetError):
    """Global turn budget ran out; carries the meeting in its partial state."""

    def __init__(self, meeting, budget: int):
        super().__init__(f"turn budget of {budget} exhausted at stage {meeting.stage.value}")
        self.meeting = meeting
        self.budget = budget


class SkillNotOwned(StudiomeetError):
    """Prompt assembly was asked to use a skill the role does not have."""


class SchemeNotFound(StudiomeetError):
    """Referenced scheme is not present in the stored scheme list."""


# --- backends -------------------------------------------------------------


class BackendError(StudiomeetError):
    """Base class for adapter failures."""


class BackendUnavailable(BackendError):
    """Backend could not be reached or kept failing after the retry budget."""


class Timeout(BackendError):
    """Backend did not answer within the configured timeout."""


class InvalidParams(BackendError):
    """Request parameters rejected before any network call."""


class MissingImage(BackendError):
    """Referenced image id is not in the content-addressed store."""


# --- persistence ----------------------------------------------------------


class UnknownMeeting(StudiomeetError):
    """No meeting with that id in the store."""


class CorruptLog(StudiomeetError):
    """Event log could not be decoded or replayed."""


class NoArtifacts(StudiomeetError):
    """Export requires at least one stage artifact."""


class StorageFailure(StudiomeetError):
    """Underlying filesystem operation failed."""


# --- evaluation statistics ------------------------------------------------


class StatsError(StudiomeetError):
    """Base class for score-analysis failures."""


class EmptyInput(StatsError):
    """Statistic asked for on an empty value list."""


class TooFewSamples(StatsError):
    """A t-test group needs at least two observations."""


class TooFewSchemes(StatsError):
    """Reliability needs at least two judges and three schemes."""


class DegenerateVariance(StatsError):
    """Correlation undefined because a judge's ratings are constant."""


class ParseError(StatsError):
    """Score CSV row could not be parsed; carries the row number."""

    def __init__(self, row: int, message: str):
        super().__init__(f"row {row}: {message}")
        self.row = row


class RangeError(StatsError):
    """Score outside the 1..7 scale; carries the row number."""

    def __init__(self, row: int, message: str):
        super().__init__(f"row {row}: {message}")
        self.row = row


class DuplicateRecord(StatsError):
    """Same (judge, scheme) pair scored twice."""

    def __init__(self, row: int, message: str):
        super().__init__(f"row {row}: {message}")
        self.row = row
