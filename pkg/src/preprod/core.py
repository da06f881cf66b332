"""Core-agent behavior: reading director messages, planning the turn,
packaging context, the three-part result review, and publication.

Everything here is deterministic and side-effect free except
`publish_result` / `refresh_progress`, which mutate the project. The session
layer owns threading, events, snapshots, and the approval handshake; it calls
down into these functions in a fixed order.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from enum import Enum
from typing import Optional, Sequence

from .agents import AgentResult
from .boards import Project
from .config import EngineConfig
from .errors import UnknownBlockError
from .model import (
    STAGE_ORDER,
    AgentRole,
    ArtifactKind,
    ContextItem,
    IntentMode,
    ProgressRecord,
    PublicationIntent,
    Selection,
    Stage,
    StageStatus,
    TaskSpec,
    ValidationMessage,
    ValidationReport,
    element_schema,
    role_for_kind,
    stage_for_kind,
    stage_index,
    validate_elements,
)

# --- message interpretation ------------------------------------------------

_NUMBER_WORDS = {
    "one": 1, "two": 2, "three": 3, "four": 4, "five": 5,
    "six": 6, "seven": 7, "eight": 8, "nine": 9, "ten": 10,
}

_COUNT_BEFORE_RE = re.compile(
    r"(\d+|one|two|three|four|five|six|seven|eight|nine|ten)"
    r"\s+(?:different\s+|distinct\s+|new\s+|alternative\s+|fresh\s+)?$"
)

_STAGE_REQUEST_RE = re.compile(
    r"\b(?:move|go|switch|proceed|head|advance|jump)\s+(?:on\s+)?(?:back\s+)?to"
    r"\s+(?:the\s+)?(planning|ideation|scripting|design|storyboard)"
    r"(?:\s+(?:stage|phase|board))?\b"
    r"|\b(?:start|begin|enter|reopen)\s+(?:the\s+)?"
    r"(planning|ideation|scripting|design|storyboard)\s+(?:stage|phase)\b"
)

_OPEN_CHANNEL_RE = re.compile(
    r"\b(?:talk|speak|chat)\s+(?:directly\s+)?(?:to|with)\s+the\s+"
    r"(ideation|scripting|design|art)\s+agent\b"
    r"|\bopen\s+a\s+(?:direct\s+)?channel\s+(?:to|with)\s+the\s+"
    r"(ideation|scripting|design|art)\s+agent\b"
)

_CLOSE_CHANNEL_RE = re.compile(
    r"\b(?:close|end)\s+the\s+channel\b|\bback\s+to\s+(?:you|the\s+director)\b"
)

_AFFIRMATIVE = {
    "yes", "y", "yes please", "ok", "okay", "sure", "go ahead", "do it",
    "sounds good", "approve", "approved", "proceed", "please do", "yep",
    "yeah", "confirm", "confirmed", "green light",
}
_NEGATIVE = {
    "no", "nope", "not yet", "hold off", "don't", "do not", "stop",
    "cancel", "cancel that", "skip it", "never mind", "nevermind",
}

#: Surface phrases mapped to artifact kinds; matched longest-first with the
#: consumed span suppressing shorter overlapping phrases ("storyboard
#: sequence" wins over "storyboard", which wins over "story"). Plural "s" is
#: tolerated on every phrase.
_KIND_PHRASES: tuple[tuple[str, Optional[ArtifactKind]], ...] = (
    ("storyboard sequence", ArtifactKind.STORYBOARD_SEQUENCE),
    ("three-act structure", ArtifactKind.THREE_ACT_STRUCTURE),
    ("three act structure", ArtifactKind.THREE_ACT_STRUCTURE),
    ("environment design", ArtifactKind.ENVIRONMENT_DESIGN),
    ("style description", ArtifactKind.STYLE_DESCRIPTION),
    ("character concept", ArtifactKind.CHARACTER_CONCEPT),
    ("character sheet", ArtifactKind.CHARACTER_SHEET),
    ("character design", ArtifactKind.CHARACTER_SHEET),
    ("scene breakdown", ArtifactKind.SCENE_LIST),
    ("story outline", ArtifactKind.STORY_OUTLINE),
    ("story concept", ArtifactKind.STORY_CONCEPT),
    ("world concept", ArtifactKind.WORLD_CONCEPT),
    ("world building", ArtifactKind.WORLD_CONCEPT),
    ("worldbuilding", ArtifactKind.WORLD_CONCEPT),
    ("visual style", ArtifactKind.STYLE_DESCRIPTION),
    ("style frame", ArtifactKind.STYLEFRAME),
    ("environment", ArtifactKind.ENVIRONMENT_DESIGN),
    ("storyboard", ArtifactKind.STORYBOARD_SEQUENCE),
    ("styleframe", ArtifactKind.STYLEFRAME),
    ("hero image", ArtifactKind.HERO_IMAGE),
    ("scene list", ArtifactKind.SCENE_LIST),
    ("art style", ArtifactKind.STYLE_DESCRIPTION),
    ("key art", ArtifactKind.HERO_IMAGE),
    ("concept", ArtifactKind.STORY_CONCEPT),
    ("outline", ArtifactKind.STORY_OUTLINE),
    ("logline", ArtifactKind.LOGLINE),
    ("script", ArtifactKind.SCRIPT),
    ("style", ArtifactKind.STYLE_DESCRIPTION),
    ("story", None),  # stage-dependent: concept during ideation, outline later
)


@dataclass(frozen=True)
class TaskRequest:
    """One artifact the director asked for, with an optional option count."""

    kind: ArtifactKind
    count: Optional[int] = None


@dataclass
class Interpretation:
    """Deterministic reading of one director message."""

    text: str
    affirmative: bool = False
    negative: bool = False
    stage_request: Optional[Stage] = None
    tasks: list[TaskRequest] = field(default_factory=list)
    open_channel: Optional[AgentRole] = None
    close_channel: bool = False


def _normalize_short(text: str) -> str:
    return text.strip().lower().strip(".!,;: ")


def interpret_message(text: str, current_stage: Stage) -> Interpretation:
    """Keyword reading of a director message. `current_stage` only resolves
    the ambiguous bare word "story"."""
    result = Interpretation(text=text)
    lowered = text.lower()
    short = _normalize_short(text)

    result.affirmative = short in _AFFIRMATIVE or short.startswith("yes,")
    result.negative = short in _NEGATIVE

    open_match = _OPEN_CHANNEL_RE.search(lowered)
    if open_match:
        role_name = open_match.group(1) or open_match.group(2)
        result.open_channel = AgentRole(role_name)
        return result
    if _CLOSE_CHANNEL_RE.search(lowered):
        result.close_channel = True
        return result

    consumed: list[tuple[int, int]] = []
    stage_match = _STAGE_REQUEST_RE.search(lowered)
    if stage_match:
        stage_name = stage_match.group(1) or stage_match.group(2)
        result.stage_request = Stage(stage_name)
        consumed.append(stage_match.span())

    def overlaps(span: tuple[int, int]) -> bool:
        return any(span[0] < e and s < span[1] for s, e in consumed)

    found: list[tuple[int, ArtifactKind, Optional[int]]] = []
    for phrase, kind in _KIND_PHRASES:
        pattern = re.compile(r"\b" + re.escape(phrase) + r"s?\b")
        for match in pattern.finditer(lowered):
            if overlaps(match.span()):
                continue
            consumed.append(match.span())
            if kind is None:  # bare "story"
                kind = (
                    ArtifactKind.STORY_OUTLINE
                    if current_stage is Stage.SCRIPTING
                    else ArtifactKind.STORY_CONCEPT
                )
            count_match = _COUNT_BEFORE_RE.search(lowered[: match.start()])
            count: Optional[int] = None
            if count_match:
                token = count_match.group(1)
                count = int(token) if token.isdigit() else _NUMBER_WORDS[token]
            found.append((match.start(), kind, count))

    found.sort(key=lambda item: item[0])
    seen: set[ArtifactKind] = set()
    for _, kind, count in found:
        if kind in seen:
            for i, existing in enumerate(result.tasks):
                if existing.kind is kind and existing.count is None and count:
                    result.tasks[i] = TaskRequest(kind=kind, count=count)
            continue
        seen.add(kind)
        result.tasks.append(TaskRequest(kind=kind, count=count))
    return result


# --- turn planning ---------------------------------------------------------


class DecisionAction(str, Enum):
    ANSWER = "answer-directly"
    DELEGATE = "delegate"
    ASK_APPROVAL = "ask-approval"
    SWITCH_STAGE = "switch-stage"
    OPEN_CHANNEL = "open-channel"
    CLOSE_CHANNEL = "close-channel"
    SET_BRIEF = "set-brief"


@dataclass(frozen=True)
class TurnPlan:
    """What the core agent decided to do with one message."""

    action: DecisionAction
    reply: str = ""
    target_stage: Optional[Stage] = None
    explicit_stage: bool = False
    tasks: tuple[TaskRequest, ...] = ()
    channel_role: Optional[AgentRole] = None
    notices: tuple[str, ...] = ()

    def to_dict(self) -> dict:
        return {
            "action": self.action.value,
            "target_stage": self.target_stage.value if self.target_stage else None,
            "tasks": [
                {"kind": t.kind.value, "count": t.count} for t in self.tasks
            ],
            "channel_role": self.channel_role.value if self.channel_role else None,
            "notices": list(self.notices),
        }


def _kind_label(kind: ArtifactKind) -> str:
    return kind.value.replace("_", " ")


def plan_turn(
    interpretation: Interpretation,
    current_stage: Stage,
    progress: ProgressRecord,
    config: EngineConfig,
    selection_kind: Optional[ArtifactKind] = None,
) -> TurnPlan:
    """Turn an interpreted message into a plan.

    Stage-switch policy: an explicit stage request or a backward pull implied
    by the requested work switches immediately; a forward move implied by the
    requested work needs director approval first. Hard prerequisites block
    the whole turn with an explanation rather than publishing a partial set.
    """
    if interpretation.open_channel is not None:
        return TurnPlan(
            action=DecisionAction.OPEN_CHANNEL,
            channel_role=interpretation.open_channel,
            reply=(
                f"Direct channel to the {interpretation.open_channel.value} agent "
                "is open. Say 'close the channel' to hand control back."
            ),
        )
    if interpretation.close_channel:
        return TurnPlan(
            action=DecisionAction.CLOSE_CHANNEL,
            reply="Channel closed; the director's assistant is back in charge.",
        )

    tasks = list(interpretation.tasks)
    if not tasks and selection_kind is not None and not interpretation.stage_request:
        # A selection plus free-form notes reads as "revise the selected thing".
        tasks = [TaskRequest(kind=selection_kind)]

    if not tasks and interpretation.stage_request is None:
        if current_stage is Stage.PLANNING and not progress.project_brief:
            return TurnPlan(action=DecisionAction.SET_BRIEF)
        return TurnPlan(action=DecisionAction.ANSWER)

    notices: list[str] = []
    if tasks:
        target = interpretation.stage_request or stage_for_kind(tasks[0].kind)
        kept = [t for t in tasks if stage_for_kind(t.kind) is target]
        for dropped in tasks:
            if dropped not in kept:
                notices.append(
                    f"{_kind_label(dropped.kind)} belongs to the "
                    f"{stage_for_kind(dropped.kind).value} stage; ask for it there"
                )
        tasks = kept
        if not tasks:
            return TurnPlan(
                action=DecisionAction.ANSWER,
                notices=tuple(notices),
                reply="; ".join(notices),
            )
    else:
        target = interpretation.stage_request

    # A kind produced earlier in this same turn satisfies later prerequisites;
    # "outline, then scene list" in one message is a valid sequential plan.
    scheduled: set[ArtifactKind] = set()
    for request in tasks:
        missing = [
            dep
            for dep in config.hard_prereqs.get(request.kind, ())
            if progress.canonical.get(dep) is None and dep not in scheduled
        ]
        scheduled.add(request.kind)
        if missing:
            needed = ", ".join(_kind_label(k) for k in missing)
            return TurnPlan(
                action=DecisionAction.ANSWER,
                reply=(
                    f"Cannot start the {_kind_label(request.kind)} yet: it needs "
                    f"a canonical {needed} first."
                ),
                notices=tuple(notices),
            )
    for request in tasks:
        for dep in config.soft_prereqs.get(request.kind, ()):
            if progress.canonical.get(dep) is None:
                notices.append(
                    f"no canonical {_kind_label(dep)} exists yet; proceeding "
                    f"without it"
                )

    explicit = interpretation.stage_request is not None
    if target is not None and target is not current_stage:
        forward = stage_index(target) > stage_index(current_stage)
        if forward and not explicit:
            return TurnPlan(
                action=DecisionAction.ASK_APPROVAL,
                target_stage=target,
                tasks=tuple(tasks),
                notices=tuple(notices),
                reply=(
                    f"This moves the project into the {target.value} stage "
                    f"to produce {', '.join(_kind_label(t.kind) for t in tasks)}. "
                    "Proceed?"
                ),
            )
        if not tasks:
            return TurnPlan(
                action=DecisionAction.SWITCH_STAGE,
                target_stage=target,
                explicit_stage=True,
                notices=tuple(notices),
            )
        return TurnPlan(
            action=DecisionAction.DELEGATE,
            target_stage=target,
            explicit_stage=explicit,
            tasks=tuple(tasks),
            notices=tuple(notices),
        )

    if not tasks:
        # Explicit request for the stage we are already in.
        return TurnPlan(
            action=DecisionAction.ANSWER,
            reply=f"Already in the {current_stage.value} stage.",
            notices=tuple(notices),
        )
    return TurnPlan(
        action=DecisionAction.DELEGATE,
        tasks=tuple(tasks),
        notices=tuple(notices),
    )


# --- publication intent ----------------------------------------------------


def decide_publication_intent(
    kind: ArtifactKind,
    selected_block_id: Optional[str],
    selected_block_kind: Optional[ArtifactKind],
    canonical_block_id: Optional[str],
) -> PublicationIntent:
    """Where a freshly produced artifact lands. Pure.

    Selecting a block of the same kind branches it (child-of); otherwise an
    existing canonical artifact is overwritten in place (new version on the
    canonical block); otherwise the artifact starts a new lineage root.
    """
    if selected_block_id is not None and selected_block_kind is kind:
        return PublicationIntent(IntentMode.CHILD_OF, parent_id=selected_block_id)
    if canonical_block_id is not None:
        return PublicationIntent(IntentMode.OVERWRITE_ARTIFACT, kind=kind)
    return PublicationIntent(IntentMode.NEW_ROOT)


# --- context packaging and task specs --------------------------------------


def canonical_context(
    project: Project, source_kind: ArtifactKind, block_id: str
) -> list[ContextItem]:
    """Labelled items for every element of a canonical block's active version."""
    block = project.get_block(block_id)
    items: list[ContextItem] = []
    for el in block.active.elements:
        label = f"{source_kind.value}.{el.kind}"
        if el.image_ref is not None:
            items.append(ContextItem(label=label, image_ref=el.image_ref))
        else:
            text = el.text or ""
            if el.attributes:
                folded = "; ".join(f"{k}={v}" for k, v in el.attributes.items())
                text = f"[{folded}] {text}"
            items.append(ContextItem(label=label, text=text))
    return items


def build_context(
    project: Project,
    config: EngineConfig,
    kind: ArtifactKind,
    selection: Optional[Selection],
) -> tuple[ContextItem, ...]:
    """Package the context payload for one task: selection first, then the
    project brief, then canonical source artifacts in declared order."""
    items: list[ContextItem] = []
    selected_id = selection.block_id if selection else None
    if selection is not None:
        items.extend(project.resolve_selection(selection))
    if project.progress.project_brief:
        items.append(
            ContextItem(label="project-brief", text=project.progress.project_brief)
        )
    for source_kind in config.context_sources.get(kind, ()):
        block_id = project.progress.canonical.get(source_kind)
        if block_id is None or block_id == selected_id:
            continue
        items.extend(canonical_context(project, source_kind, block_id))
    return tuple(items)


REQUESTED_COUNT_RE = re.compile(r"provide exactly (\d+)", re.IGNORECASE)


def compose_instruction(
    kind: ArtifactKind,
    user_text: str,
    count: Optional[int] = None,
    refining: bool = False,
) -> str:
    schema = element_schema(kind)
    lines = [f"Produce a {_kind_label(kind)} artifact."]
    if refining:
        lines.append(
            "Treat the selected material in the context as the starting point "
            "and revise it according to the director notes."
        )
    if count is not None:
        lines.append(f"Provide exactly {count} {schema.specs[0].kind} elements.")
    lines.append(f"Director notes: {user_text}")
    return "\n".join(lines)


def build_task_spec(
    project: Project,
    config: EngineConfig,
    task_id: str,
    request: TaskRequest,
    user_text: str,
    selection: Optional[Selection],
) -> TaskSpec:
    """Assemble the work order the core agent hands to a specialist."""
    kind = request.kind
    selected_block = (
        project.find_block(selection.block_id) if selection is not None else None
    )
    intent = decide_publication_intent(
        kind,
        selected_block.block_id if selected_block else None,
        selected_block.kind if selected_block else None,
        project.progress.canonical.get(kind),
    )
    refining = intent.mode is IntentMode.CHILD_OF
    return TaskSpec(
        task_id=task_id,
        target_role=role_for_kind(kind),
        task_kind=kind,
        instruction=compose_instruction(kind, user_text, request.count, refining),
        context_payload=build_context(project, config, kind, selection),
        publication_intent=intent,
        stage=stage_for_kind(kind),
    )


# --- result review ---------------------------------------------------------


def roster_names(project: Project) -> set[str]:
    """Character names established by the canonical character concepts."""
    block_id = project.progress.canonical.get(ArtifactKind.CHARACTER_CONCEPT)
    if block_id is None:
        return set()
    block = project.find_block(block_id)
    if block is None:
        return set()
    return {
        el.attributes["name"].strip().lower()
        for el in block.active.elements
        if "name" in el.attributes and el.attributes["name"].strip()
    }


def _split_names(raw: str) -> list[str]:
    return [part.strip().lower() for part in raw.split(",") if part.strip()]


def validate_result(project: Project, result: AgentResult) -> ValidationReport:
    """Three-part review of a task result.

    Format: elements conform to the kind's schema and image refs resolve.
    Task compliance: an explicitly requested option count is honored.
    Consistency: character references resolve against the canonical roster.
    The verdict is approve only when all three pass.
    """
    kind = result.spec.task_kind
    assert kind is not None
    messages: list[ValidationMessage] = []

    format_problems = validate_elements(kind, result.elements)
    for el in result.elements:
        if el.image_ref is not None and not project.assets.exists(el.image_ref):
            format_problems.append(
                f"element {el.element_id} references unknown asset {el.image_ref!r}"
            )
    for problem in format_problems:
        messages.append(ValidationMessage("format", "error", problem))

    spec_ok = True
    count_match = REQUESTED_COUNT_RE.search(result.spec.instruction)
    if count_match:
        wanted = int(count_match.group(1))
        primary = element_schema(kind).specs[0].kind
        got = sum(1 for el in result.elements if el.kind == primary)
        if got != wanted:
            spec_ok = False
            messages.append(
                ValidationMessage(
                    "spec",
                    "error",
                    f"the task asked for exactly {wanted} {primary} elements, "
                    f"got {got}",
                )
            )

    consistency_ok = True
    roster = roster_names(project)
    if roster and kind in (ArtifactKind.CHARACTER_SHEET, ArtifactKind.SCENE_LIST):
        for el in result.elements:
            if kind is ArtifactKind.CHARACTER_SHEET:
                names = (
                    [el.attributes["name"]] if "name" in el.attributes else []
                )
            else:
                names = _split_names(el.attributes.get("characters", ""))
            for name in names:
                if name.strip().lower() not in roster:
                    consistency_ok = False
                    messages.append(
                        ValidationMessage(
                            "consistency",
                            "error",
                            f"character {name.strip()!r} is not in the "
                            "established roster",
                        )
                    )

    return ValidationReport(
        format_ok=not format_problems,
        spec_ok=spec_ok,
        consistency_ok=consistency_ok,
        messages=tuple(messages),
    )


def revised_spec(spec: TaskSpec, report: ValidationReport, round_number: int) -> TaskSpec:
    """Same task with the reviewer's feedback appended to the instruction."""
    instruction = (
        f"{spec.instruction}\n\n## Revision feedback (round {round_number})\n"
        f"{report.feedback_text()}"
    )
    return TaskSpec(
        task_id=spec.task_id,
        target_role=spec.target_role,
        task_kind=spec.task_kind,
        instruction=instruction,
        context_payload=spec.context_payload,
        publication_intent=spec.publication_intent,
        stage=spec.stage,
    )


# --- publication -----------------------------------------------------------


@dataclass(frozen=True)
class PublicationEffect:
    mode: IntentMode
    kind: ArtifactKind
    block_id: str
    version_index: int
    canonical_changed: bool

    def to_dict(self) -> dict:
        return {
            "mode": self.mode.value,
            "kind": self.kind.value,
            "block_id": self.block_id,
            "version_index": self.version_index,
            "canonical_changed": self.canonical_changed,
        }


def publish_result(project: Project, result: AgentResult) -> PublicationEffect:
    """Apply an approved result to the project boards and canonical registry.

    New roots and branch children both become the canonical artifact of their
    kind; overwriting adds a version to the canonical block, which stays
    canonical.
    """
    spec = result.spec
    kind = spec.task_kind
    assert kind is not None
    intent = spec.publication_intent
    progress = project.progress

    if intent.mode is IntentMode.OVERWRITE_ARTIFACT:
        block_id = progress.canonical.get(kind)
        if block_id is None or project.find_block(block_id) is None:
            raise UnknownBlockError(
                f"no canonical {kind.value} block to overwrite"
            )
        version_index = project.add_version(
            block_id, result.elements, origin_task=spec.task_id
        )
        return PublicationEffect(
            mode=intent.mode,
            kind=kind,
            block_id=block_id,
            version_index=version_index,
            canonical_changed=False,
        )

    parent_id = intent.parent_id if intent.mode is IntentMode.CHILD_OF else None
    block = project.create_block(
        stage_for_kind(kind), kind, parent_id, result.elements, origin_task=spec.task_id
    )
    changed = progress.canonical.get(kind) != block.block_id
    project.progress = progress.with_canonical(kind, block.block_id)
    return PublicationEffect(
        mode=intent.mode,
        kind=kind,
        block_id=block.block_id,
        version_index=0,
        canonical_changed=changed,
    )


def refresh_progress(project: Project, config: EngineConfig) -> None:
    """Recompute per-stage status from boards and the canonical registry."""
    progress = project.progress
    for stage in STAGE_ORDER:
        if stage is Stage.PLANNING:
            status = (
                StageStatus.COMPLETE
                if progress.project_brief
                else StageStatus.NOT_STARTED
            )
        else:
            criteria = config.completion_criteria.get(stage, ())
            met = criteria and all(
                progress.canonical.get(kind) is not None for kind in criteria
            )
            if met:
                status = StageStatus.COMPLETE
            elif project.board(stage).blocks:
                status = StageStatus.IN_PROGRESS
            else:
                status = StageStatus.NOT_STARTED
        progress = progress.with_status(stage, status)
    project.progress = progress


def suggest_next_step(progress: ProgressRecord, config: EngineConfig) -> str:
    """One-line pointer at the earliest stage that still needs work."""
    for stage in STAGE_ORDER:
        if progress.stage_status[stage] is StageStatus.COMPLETE:
            continue
        if stage is Stage.PLANNING:
            return "Next: capture the project brief."
        missing = [
            _kind_label(kind)
            for kind in config.completion_criteria.get(stage, ())
            if progress.canonical.get(kind) is None
        ]
        if missing:
            return f"Next: {stage.value} stage; still needed: {', '.join(missing)}."
        return f"Next: {stage.value} stage."
    return "All stages are complete."


def describe_tasks(tasks: Sequence[TaskRequest]) -> str:
    parts = []
    for request in tasks:
        label = _kind_label(request.kind)
        parts.append(f"{request.count} {label} options" if request.count else label)
    return ", ".join(parts)
