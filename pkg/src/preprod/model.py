"""Shared domain types for the pre-production engine.

Everything here is an immutable value object with a canonical JSON form
(`to_dict` / `from_dict`); that form is both the persistence format and the
wire payload format. The stage/kind/role tables at the bottom are the single
source of truth for board routing and agent ownership.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from datetime import datetime, timezone
from enum import Enum
from typing import Any, Mapping, Optional, Sequence


class Stage(str, Enum):
    PLANNING = "planning"
    IDEATION = "ideation"
    SCRIPTING = "scripting"
    DESIGN = "design"
    STORYBOARD = "storyboard"


#: Canonical stage order; "forward" and "backward" transitions refer to this.
STAGE_ORDER: tuple[Stage, ...] = (
    Stage.PLANNING,
    Stage.IDEATION,
    Stage.SCRIPTING,
    Stage.DESIGN,
    Stage.STORYBOARD,
)

#: Stages that own a board. Planning has none; it is handled in conversation only.
BOARD_STAGES: tuple[Stage, ...] = (
    Stage.IDEATION,
    Stage.SCRIPTING,
    Stage.DESIGN,
    Stage.STORYBOARD,
)


class AgentRole(str, Enum):
    CORE = "core"
    IDEATION = "ideation"
    SCRIPTING = "scripting"
    DESIGN = "design"
    ART = "art"


#: Valid delegation targets; the core agent never delegates to itself.
SPECIALIST_ROLES: tuple[AgentRole, ...] = (
    AgentRole.IDEATION,
    AgentRole.SCRIPTING,
    AgentRole.DESIGN,
    AgentRole.ART,
)


class ArtifactKind(str, Enum):
    LOGLINE = "logline"
    STORY_CONCEPT = "story_concept"
    WORLD_CONCEPT = "world_concept"
    STYLE_DESCRIPTION = "style_description"
    CHARACTER_CONCEPT = "character_concept"
    THREE_ACT_STRUCTURE = "three_act_structure"
    STORY_OUTLINE = "story_outline"
    SCENE_LIST = "scene_list"
    SCRIPT = "script"
    CHARACTER_SHEET = "character_sheet"
    ENVIRONMENT_DESIGN = "environment_design"
    HERO_IMAGE = "hero_image"
    STYLEFRAME = "styleframe"
    STORYBOARD_SEQUENCE = "storyboard_sequence"


class StageStatus(str, Enum):
    NOT_STARTED = "not-started"
    IN_PROGRESS = "in-progress"
    COMPLETE = "complete"


class EventKind(str, Enum):
    AGENT_STATUS = "agent-status"
    CHAT_MESSAGE = "chat-message"
    BLOCK_PUBLISHED = "block-published"
    BLOCK_UPDATED = "block-updated"
    STAGE_CHANGED = "stage-changed"
    APPROVAL_REQUEST = "approval-request"
    ERROR = "error"
    DONE = "done"


# --- timestamps ------------------------------------------------------------

WIRE_TS_FORMAT = "%Y-%m-%dT%H:%M:%S.%f"


def ts_to_wire(dt: datetime) -> str:
    """UTC millisecond ISO form, e.g. 2030-01-01T00:00:00.000Z."""
    dt = dt.astimezone(timezone.utc) if dt.tzinfo else dt.replace(tzinfo=timezone.utc)
    return dt.strftime(WIRE_TS_FORMAT)[:-3] + "Z"


def ts_from_wire(raw: str) -> datetime:
    if raw.endswith("Z"):
        raw = raw[:-1]
    parsed = datetime.strptime(raw, WIRE_TS_FORMAT)
    return parsed.replace(tzinfo=timezone.utc)


# --- elements and element schemas ------------------------------------------

#: Attribute keys every scene-entry element must carry (values may be empty).
SCENE_ATTRIBUTES: tuple[str, ...] = (
    "scene_number",
    "location",
    "time_of_day",
    "characters",
    "description",
    "styleframe_slot",
)


@dataclass(frozen=True)
class Element:
    """One addressable item inside a block version: text or a stored image ref."""

    element_id: str
    kind: str
    text: Optional[str] = None
    image_ref: Optional[str] = None
    attributes: Mapping[str, str] = field(default_factory=dict)

    def __post_init__(self):
        if (self.text is None) == (self.image_ref is None):
            raise ValueError(
                f"element {self.element_id}: exactly one of text/image_ref must be set"
            )
        object.__setattr__(self, "attributes", dict(self.attributes))

    @property
    def is_image(self) -> bool:
        return self.image_ref is not None

    def to_dict(self) -> dict[str, Any]:
        return {
            "element_id": self.element_id,
            "kind": self.kind,
            "text": self.text,
            "image_ref": self.image_ref,
            "attributes": dict(self.attributes),
        }

    @classmethod
    def from_dict(cls, data: Mapping[str, Any]) -> "Element":
        return cls(
            element_id=data["element_id"],
            kind=data["kind"],
            text=data.get("text"),
            image_ref=data.get("image_ref"),
            attributes=dict(data.get("attributes") or {}),
        )


@dataclass(frozen=True)
class ElementSpec:
    """Requirement for one element kind within an artifact's schema."""

    kind: str
    content: str  # "text" | "image"
    min_count: int
    max_count: Optional[int]
    required_attributes: tuple[str, ...] = ()


@dataclass(frozen=True)
class ElementSchema:
    artifact_kind: "ArtifactKind"
    specs: tuple[ElementSpec, ...]

    def spec_for(self, element_kind: str) -> Optional[ElementSpec]:
        for spec in self.specs:
            if spec.kind == element_kind:
                return spec
        return None


def _schema(kind: ArtifactKind, *specs: tuple) -> ElementSchema:
    return ElementSchema(kind, tuple(ElementSpec(*s) for s in specs))


_SCHEMAS: dict[ArtifactKind, ElementSchema] = {
    ArtifactKind.LOGLINE: _schema(
        ArtifactKind.LOGLINE, ("logline-option", "text", 1, None)
    ),
    ArtifactKind.STORY_CONCEPT: _schema(
        ArtifactKind.STORY_CONCEPT, ("concept-option", "text", 1, None)
    ),
    ArtifactKind.WORLD_CONCEPT: _schema(
        ArtifactKind.WORLD_CONCEPT, ("world-option", "text", 1, None)
    ),
    ArtifactKind.STYLE_DESCRIPTION: _schema(
        ArtifactKind.STYLE_DESCRIPTION, ("style-option", "text", 1, None)
    ),
    ArtifactKind.CHARACTER_CONCEPT: _schema(
        ArtifactKind.CHARACTER_CONCEPT, ("character-option", "text", 1, None, ("name",))
    ),
    ArtifactKind.THREE_ACT_STRUCTURE: _schema(
        ArtifactKind.THREE_ACT_STRUCTURE,
        ("act-section", "text", 3, 3, ("act", "turning_point")),
    ),
    ArtifactKind.STORY_OUTLINE: _schema(
        ArtifactKind.STORY_OUTLINE, ("outline-entry", "text", 1, None)
    ),
    ArtifactKind.SCENE_LIST: _schema(
        ArtifactKind.SCENE_LIST, ("scene-entry", "text", 1, None, SCENE_ATTRIBUTES)
    ),
    ArtifactKind.SCRIPT: _schema(
        ArtifactKind.SCRIPT, ("script-section", "text", 1, None)
    ),
    ArtifactKind.CHARACTER_SHEET: _schema(
        ArtifactKind.CHARACTER_SHEET,
        ("image-asset", "image", 1, None, ("name",)),
        ("text-field", "text", 0, None),
    ),
    ArtifactKind.ENVIRONMENT_DESIGN: _schema(
        ArtifactKind.ENVIRONMENT_DESIGN,
        ("image-asset", "image", 1, None, ("name",)),
        ("text-field", "text", 0, None),
    ),
    ArtifactKind.HERO_IMAGE: _schema(
        ArtifactKind.HERO_IMAGE,
        ("image-asset", "image", 1, 1),
        ("text-field", "text", 1, 1),
    ),
    ArtifactKind.STYLEFRAME: _schema(
        ArtifactKind.STYLEFRAME,
        ("image-asset", "image", 1, 1),
        ("text-field", "text", 0, 1),
    ),
    ArtifactKind.STORYBOARD_SEQUENCE: _schema(
        ArtifactKind.STORYBOARD_SEQUENCE,
        ("shot-panel", "image", 1, None, ("shot_number", "description")),
    ),
}


def element_schema(kind: ArtifactKind) -> ElementSchema:
    """Declared element schema for an artifact kind. Total over the enumeration."""
    return _SCHEMAS[kind]


def validate_elements(kind: ArtifactKind, elements: Sequence[Element]) -> list[str]:
    """Check elements against the kind's schema; returns a list of problems.

    Empty list means the elements conform. Attribute values may be empty, but
    every required attribute key must be present on every element of its kind.
    """
    schema = element_schema(kind)
    problems: list[str] = []

    seen_ids: set[str] = set()
    for el in elements:
        if el.element_id in seen_ids:
            problems.append(f"duplicate element_id {el.element_id}")
        seen_ids.add(el.element_id)

    counts: dict[str, int] = {}
    for el in elements:
        spec = schema.spec_for(el.kind)
        if spec is None:
            problems.append(
                f"element kind {el.kind!r} not allowed for {kind.value}"
            )
            continue
        counts[el.kind] = counts.get(el.kind, 0) + 1
        if spec.content == "text" and el.text is None:
            problems.append(f"element {el.element_id} ({el.kind}) must carry text")
        if spec.content == "image" and el.image_ref is None:
            problems.append(
                f"element {el.element_id} ({el.kind}) must carry an image reference"
            )
        for attr in spec.required_attributes:
            if attr not in el.attributes:
                problems.append(
                    f"element {el.element_id} ({el.kind}) missing attribute {attr!r}"
                )

    for spec in schema.specs:
        count = counts.get(spec.kind, 0)
        if count < spec.min_count:
            problems.append(
                f"{kind.value} requires at least {spec.min_count} {spec.kind} "
                f"element(s), found {count}"
            )
        if spec.max_count is not None and count > spec.max_count:
            problems.append(
                f"{kind.value} allows at most {spec.max_count} {spec.kind} "
                f"element(s), found {count}"
            )
    return problems


# --- blocks ----------------------------------------------------------------

USER_EDIT_ORIGIN = "user-edit"


@dataclass(frozen=True)
class BlockVersion:
    version_index: int
    elements: tuple[Element, ...]
    created_at: datetime
    origin_task: str  # TaskSpec id, or "user-edit"

    def __post_init__(self):
        object.__setattr__(self, "elements", tuple(self.elements))
        ids = [el.element_id for el in self.elements]
        if len(ids) != len(set(ids)):
            raise ValueError("element ids must be unique within a version")

    def element(self, element_id: str) -> Optional[Element]:
        for el in self.elements:
            if el.element_id == element_id:
                return el
        return None

    def to_dict(self) -> dict[str, Any]:
        return {
            "version_index": self.version_index,
            "elements": [el.to_dict() for el in self.elements],
            "created_at": ts_to_wire(self.created_at),
            "origin_task": self.origin_task,
        }

    @classmethod
    def from_dict(cls, data: Mapping[str, Any]) -> "BlockVersion":
        return cls(
            version_index=int(data["version_index"]),
            elements=tuple(Element.from_dict(e) for e in data["elements"]),
            created_at=ts_from_wire(data["created_at"]),
            origin_task=data["origin_task"],
        )


@dataclass(frozen=True)
class Block:
    """Lineage-aware, versioned artifact container living on one stage board."""

    block_id: str
    stage: Stage
    kind: ArtifactKind
    parent_id: Optional[str]
    versions: tuple[BlockVersion, ...]
    active_version: int = 0
    pinned: bool = False
    collapsed: bool = False

    def __post_init__(self):
        object.__setattr__(self, "versions", tuple(self.versions))
        if not self.versions:
            raise ValueError(f"block {self.block_id} must have at least one version")
        for i, version in enumerate(self.versions):
            if version.version_index != i:
                raise ValueError(
                    f"block {self.block_id}: version indices must be contiguous from 0"
                )
        if not (0 <= self.active_version < len(self.versions)):
            raise ValueError(f"block {self.block_id}: active_version out of range")

    @property
    def active(self) -> BlockVersion:
        return self.versions[self.active_version]

    @property
    def latest(self) -> BlockVersion:
        return self.versions[-1]

    def with_version(self, version: BlockVersion) -> "Block":
        return replace(
            self,
            versions=self.versions + (version,),
            active_version=version.version_index,
        )

    def to_dict(self) -> dict[str, Any]:
        return {
            "block_id": self.block_id,
            "stage": self.stage.value,
            "kind": self.kind.value,
            "parent_id": self.parent_id,
            "versions": [v.to_dict() for v in self.versions],
            "active_version": self.active_version,
            "pinned": self.pinned,
            "collapsed": self.collapsed,
        }

    @classmethod
    def from_dict(cls, data: Mapping[str, Any]) -> "Block":
        return cls(
            block_id=data["block_id"],
            stage=Stage(data["stage"]),
            kind=ArtifactKind(data["kind"]),
            parent_id=data.get("parent_id"),
            versions=tuple(BlockVersion.from_dict(v) for v in data["versions"]),
            active_version=int(data.get("active_version", 0)),
            pinned=bool(data.get("pinned", False)),
            collapsed=bool(data.get("collapsed", False)),
        )


@dataclass(frozen=True)
class Selection:
    """A block (or specific elements of one version) chosen as agent context."""

    block_id: str
    version_index: int
    element_ids: tuple[str, ...] = ()  # empty = whole-block selection

    def __post_init__(self):
        object.__setattr__(self, "element_ids", tuple(self.element_ids))

    def to_dict(self) -> dict[str, Any]:
        return {
            "block_id": self.block_id,
            "version_index": self.version_index,
            "element_ids": list(self.element_ids),
        }

    @classmethod
    def from_dict(cls, data: Mapping[str, Any]) -> "Selection":
        return cls(
            block_id=data["block_id"],
            version_index=int(data["version_index"]),
            element_ids=tuple(data.get("element_ids") or ()),
        )


# --- task specifications ----------------------------------------------------


@dataclass(frozen=True)
class ContextItem:
    """One labelled piece of packaged context: text or an image reference."""

    label: str
    text: Optional[str] = None
    image_ref: Optional[str] = None

    def __post_init__(self):
        if (self.text is None) == (self.image_ref is None):
            raise ValueError(f"context item {self.label!r}: need text or image_ref")

    def to_dict(self) -> dict[str, Any]:
        return {"label": self.label, "text": self.text, "image_ref": self.image_ref}

    @classmethod
    def from_dict(cls, data: Mapping[str, Any]) -> "ContextItem":
        return cls(
            label=data["label"],
            text=data.get("text"),
            image_ref=data.get("image_ref"),
        )


class IntentMode(str, Enum):
    NEW_ROOT = "new-root"
    CHILD_OF = "child-of"
    OVERWRITE_ARTIFACT = "overwrite-artifact"


@dataclass(frozen=True)
class PublicationIntent:
    mode: IntentMode
    parent_id: Optional[str] = None  # required for CHILD_OF
    kind: Optional[ArtifactKind] = None  # required for OVERWRITE_ARTIFACT

    def __post_init__(self):
        if self.mode is IntentMode.CHILD_OF and not self.parent_id:
            raise ValueError("child-of intent requires parent_id")
        if self.mode is IntentMode.OVERWRITE_ARTIFACT and self.kind is None:
            raise ValueError("overwrite-artifact intent requires kind")

    def to_dict(self) -> dict[str, Any]:
        return {
            "mode": self.mode.value,
            "parent_id": self.parent_id,
            "kind": self.kind.value if self.kind else None,
        }

    @classmethod
    def from_dict(cls, data: Mapping[str, Any]) -> "PublicationIntent":
        return cls(
            mode=IntentMode(data["mode"]),
            parent_id=data.get("parent_id"),
            kind=ArtifactKind(data["kind"]) if data.get("kind") else None,
        )


DIRECT_CHAT = "direct-chat"


@dataclass(frozen=True)
class TaskSpec:
    """Core-authored work order for one specialized agent.

    task_kind None means direct chat (no artifact output expected); on the
    wire that serializes as the string "direct-chat".
    """

    task_id: str
    target_role: AgentRole
    task_kind: Optional[ArtifactKind]
    instruction: str
    context_payload: tuple[ContextItem, ...]
    publication_intent: PublicationIntent
    stage: Stage

    def __post_init__(self):
        if self.target_role is AgentRole.CORE:
            raise ValueError("task target must be a specialized agent")
        object.__setattr__(self, "context_payload", tuple(self.context_payload))

    def to_dict(self) -> dict[str, Any]:
        return {
            "task_id": self.task_id,
            "target_role": self.target_role.value,
            "task_kind": self.task_kind.value if self.task_kind else DIRECT_CHAT,
            "instruction": self.instruction,
            "context_payload": [item.to_dict() for item in self.context_payload],
            "publication_intent": self.publication_intent.to_dict(),
            "stage": self.stage.value,
        }

    @classmethod
    def from_dict(cls, data: Mapping[str, Any]) -> "TaskSpec":
        raw_kind = data["task_kind"]
        return cls(
            task_id=data["task_id"],
            target_role=AgentRole(data["target_role"]),
            task_kind=None if raw_kind == DIRECT_CHAT else ArtifactKind(raw_kind),
            instruction=data["instruction"],
            context_payload=tuple(
                ContextItem.from_dict(item) for item in data["context_payload"]
            ),
            publication_intent=PublicationIntent.from_dict(data["publication_intent"]),
            stage=Stage(data["stage"]),
        )


# --- validation reports -----------------------------------------------------


@dataclass(frozen=True)
class ValidationMessage:
    check: str  # "format" | "spec" | "consistency"
    severity: str  # "error" | "warning" | "info"
    text: str

    def to_dict(self) -> dict[str, Any]:
        return {"check": self.check, "severity": self.severity, "text": self.text}

    @classmethod
    def from_dict(cls, data: Mapping[str, Any]) -> "ValidationMessage":
        return cls(check=data["check"], severity=data["severity"], text=data["text"])


@dataclass(frozen=True)
class ValidationReport:
    """Outcome of the three-part result review. Approve iff all checks pass."""

    format_ok: bool
    spec_ok: bool
    consistency_ok: bool
    messages: tuple[ValidationMessage, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "messages", tuple(self.messages))

    @property
    def approved(self) -> bool:
        return self.format_ok and self.spec_ok and self.consistency_ok

    def feedback_text(self) -> str:
        """Revision feedback assembled from failing checks."""
        lines = [
            f"[{m.check}] {m.text}" for m in self.messages if m.severity == "error"
        ]
        return "\n".join(lines) if lines else "revise and resubmit"

    def to_dict(self) -> dict[str, Any]:
        return {
            "format_ok": self.format_ok,
            "spec_ok": self.spec_ok,
            "consistency_ok": self.consistency_ok,
            "messages": [m.to_dict() for m in self.messages],
            "verdict": "approve" if self.approved else "request-revision",
        }

    @classmethod
    def from_dict(cls, data: Mapping[str, Any]) -> "ValidationReport":
        return cls(
            format_ok=bool(data["format_ok"]),
            spec_ok=bool(data["spec_ok"]),
            consistency_ok=bool(data["consistency_ok"]),
            messages=tuple(
                ValidationMessage.from_dict(m) for m in data.get("messages", [])
            ),
        )


# --- progress record --------------------------------------------------------


@dataclass(frozen=True)
class ProgressRecord:
    """Registry of canonical artifacts plus per-stage status and project brief."""

    canonical: Mapping[ArtifactKind, str] = field(default_factory=dict)
    stage_status: Mapping[Stage, StageStatus] = field(default_factory=dict)
    project_brief: str = ""

    def __post_init__(self):
        object.__setattr__(self, "canonical", dict(self.canonical))
        status = {stage: StageStatus.NOT_STARTED for stage in Stage}
        status.update(self.stage_status)
        object.__setattr__(self, "stage_status", status)

    def canonical_block(self, kind: ArtifactKind) -> Optional[str]:
        return self.canonical.get(kind)

    def with_canonical(self, kind: ArtifactKind, block_id: str) -> "ProgressRecord":
        updated = dict(self.canonical)
        updated[kind] = block_id
        return replace(self, canonical=updated)

    def with_brief(self, brief: str) -> "ProgressRecord":
        return replace(self, project_brief=brief)

    def with_status(self, stage: Stage, status: StageStatus) -> "ProgressRecord":
        updated = dict(self.stage_status)
        updated[stage] = status
        return replace(self, stage_status=updated)

    def to_dict(self) -> dict[str, Any]:
        return {
            "canonical": {k.value: v for k, v in sorted(self.canonical.items())},
            "stage_status": {
                stage.value: self.stage_status[stage].value for stage in Stage
            },
            "project_brief": self.project_brief,
        }

    @classmethod
    def from_dict(cls, data: Mapping[str, Any]) -> "ProgressRecord":
        return cls(
            canonical={
                ArtifactKind(k): v for k, v in (data.get("canonical") or {}).items()
            },
            stage_status={
                Stage(k): StageStatus(v)
                for k, v in (data.get("stage_status") or {}).items()
            },
            project_brief=data.get("project_brief", ""),
        )


# --- session events ---------------------------------------------------------


@dataclass(frozen=True)
class SessionEvent:
    """Typed streaming event; event_seq is strictly increasing per session."""

    event_seq: int
    event_kind: EventKind
    payload: Mapping[str, Any]
    agent: AgentRole
    session_id: str
    created_at: datetime

    def __post_init__(self):
        object.__setattr__(self, "payload", dict(self.payload))

    def to_dict(self) -> dict[str, Any]:
        return {
            "event_seq": self.event_seq,
            "event_kind": self.event_kind.value,
            "payload": dict(self.payload),
            "agent": self.agent.value,
            "session_id": self.session_id,
            "created_at": ts_to_wire(self.created_at),
        }

    @classmethod
    def from_dict(cls, data: Mapping[str, Any]) -> "SessionEvent":
        return cls(
            event_seq=int(data["event_seq"]),
            event_kind=EventKind(data["event_kind"]),
            payload=dict(data.get("payload") or {}),
            agent=AgentRole(data["agent"]),
            session_id=data["session_id"],
            created_at=ts_from_wire(data["created_at"]),
        )


# --- routing tables ---------------------------------------------------------

#: Which board each artifact kind belongs to. Hero images sit beside the
#: character/environment sheets on the Design board; standalone styleframes and
#: storyboard sequences live on the Storyboard board.
KIND_STAGE: dict[ArtifactKind, Stage] = {
    ArtifactKind.LOGLINE: Stage.IDEATION,
    ArtifactKind.STORY_CONCEPT: Stage.IDEATION,
    ArtifactKind.WORLD_CONCEPT: Stage.IDEATION,
    ArtifactKind.STYLE_DESCRIPTION: Stage.IDEATION,
    ArtifactKind.CHARACTER_CONCEPT: Stage.IDEATION,
    ArtifactKind.THREE_ACT_STRUCTURE: Stage.SCRIPTING,
    ArtifactKind.STORY_OUTLINE: Stage.SCRIPTING,
    ArtifactKind.SCENE_LIST: Stage.SCRIPTING,
    ArtifactKind.SCRIPT: Stage.SCRIPTING,
    ArtifactKind.CHARACTER_SHEET: Stage.DESIGN,
    ArtifactKind.ENVIRONMENT_DESIGN: Stage.DESIGN,
    ArtifactKind.HERO_IMAGE: Stage.DESIGN,
    ArtifactKind.STYLEFRAME: Stage.STORYBOARD,
    ArtifactKind.STORYBOARD_SEQUENCE: Stage.STORYBOARD,
}

#: Which specialized agent owns the tool for each artifact kind.
KIND_ROLE: dict[ArtifactKind, AgentRole] = {
    ArtifactKind.LOGLINE: AgentRole.IDEATION,
    ArtifactKind.STORY_CONCEPT: AgentRole.IDEATION,
    ArtifactKind.WORLD_CONCEPT: AgentRole.IDEATION,
    ArtifactKind.STYLE_DESCRIPTION: AgentRole.IDEATION,
    ArtifactKind.CHARACTER_CONCEPT: AgentRole.IDEATION,
    ArtifactKind.THREE_ACT_STRUCTURE: AgentRole.SCRIPTING,
    ArtifactKind.STORY_OUTLINE: AgentRole.SCRIPTING,
    ArtifactKind.SCENE_LIST: AgentRole.SCRIPTING,
    ArtifactKind.SCRIPT: AgentRole.SCRIPTING,
    ArtifactKind.CHARACTER_SHEET: AgentRole.DESIGN,
    ArtifactKind.ENVIRONMENT_DESIGN: AgentRole.DESIGN,
    ArtifactKind.HERO_IMAGE: AgentRole.ART,
    ArtifactKind.STYLEFRAME: AgentRole.ART,
    ArtifactKind.STORYBOARD_SEQUENCE: AgentRole.ART,
}


def stage_for_kind(kind: ArtifactKind) -> Stage:
    return KIND_STAGE[kind]


def role_for_kind(kind: ArtifactKind) -> AgentRole:
    return KIND_ROLE[kind]


def stage_index(stage: Stage) -> int:
    return STAGE_ORDER.index(stage)
