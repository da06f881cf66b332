"""Engine error taxonomy. Every error carries a stable machine-readable code."""

from __future__ import annotations

from typing import Any


class EngineError(Exception):
    """Base class for all engine errors; `code` is part of the wire contract."""

    code = "engine-error"

    def __init__(self, message: str, **details: Any):
        super().__init__(message)
        self.message = message
        self.details = details

    def to_dict(self) -> dict[str, Any]:
        return {"code": self.code, "message": self.message, "details": self.details}


class StageKindMismatchError(EngineError):
    code = "stage-kind-mismatch"


class SchemaViolationError(EngineError):
    """Elements do not satisfy the artifact kind's element schema."""

    code = "schema-violation"

    def __init__(self, message: str, problems: list[str] | None = None, **details: Any):
        super().__init__(message, **details)
        self.problems = problems or []

    def to_dict(self) -> dict[str, Any]:
        data = super().to_dict()
        data["problems"] = self.problems
        return data


class UnknownBlockError(EngineError):
    code = "unknown-block"


class UnknownParentError(EngineError):
    code = "unknown-parent"


class BadVersionIndexError(EngineError):
    code = "bad-index"


class StaleSelectionError(EngineError):
    code = "stale-selection"


class UnknownAssetError(EngineError):
    code = "unknown-asset"


class IoFailureError(EngineError):
    code = "io-failure"


class FormatVersionError(EngineError):
    code = "format-version-mismatch"


class ProviderFailureError(EngineError):
    """Text or image provider call failed; `reason` says why."""

    code = "provider-failure"

    def __init__(self, message: str, reason: str = "unknown", **details: Any):
        super().__init__(message, reason=reason, **details)
        self.reason = reason


class AssetWriteFailureError(EngineError):
    code = "asset-write-failure"


class MissingPromptFileError(EngineError):
    code = "missing-prompt-file"


class NoSuchToolError(EngineError):
    code = "no-such-tool"


class MalformedOutputError(EngineError):
    code = "malformed-output"


class MissingDependencyError(EngineError):
    """A required upstream artifact is absent; `required_kind` names it."""

    code = "missing-dependency"

    def __init__(self, message: str, required_kind: str, **details: Any):
        super().__init__(message, required_kind=required_kind, **details)
        self.required_kind = required_kind


class ExhaustedRevisionsError(EngineError):
    code = "exhausted-revisions"

    def __init__(self, message: str, report: Any = None, **details: Any):
        super().__init__(message, **details)
        self.report = report


class ChannelAlreadyOpenError(EngineError):
    code = "channel-already-open"


class RoleInvalidError(EngineError):
    code = "role-invalid"


class BusyError(EngineError):
    code = "busy"


class LivenessCeilingError(EngineError):
    """A single request emitted more events than the configured ceiling;
    treated as a runaway loop and aborted."""

    code = "event-ceiling"


class InvalidSelectionError(EngineError):
    code = "invalid-selection"


class NoSuchRequestError(EngineError):
    code = "no-such-request"


class UnknownSessionError(EngineError):
    code = "unknown-session"


class BadBriefError(EngineError):
    code = "bad-brief"


class RequestCancelledError(EngineError):
    code = "cancelled"


class ScenarioMalformedError(EngineError):
    code = "scenario-malformed"
