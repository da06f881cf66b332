"""Specialized-agent execution: tool registry, provider round trips, output
parsing, and the order-preserving parallel runner.

Every artifact kind is produced through exactly one generation tool owned by
exactly one role. A task run is: assemble prompt, call the provider, parse
the reply into elements, and synthesize any requested images. Cancellation
and snapshotting hook in through the `checkpoint` callable, which the session
invokes at the named safe points below.
"""

from __future__ import annotations

import json
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Any, Callable, Optional, Sequence

from .assets import AssetStore
from .errors import MalformedOutputError, NoSuchToolError
from .model import (
    KIND_ROLE,
    AgentRole,
    ArtifactKind,
    Element,
    TaskSpec,
)
from .prompts import PromptLibrary
from .providers import ProviderRequest, TextImageProvider, assemble_prompt

#: Safe-point labels passed to the checkpoint callable. Rollback coverage is
#: asserted at each of these.
SAFE_BEFORE_PROVIDER = "before-provider-call"
SAFE_AFTER_PROVIDER = "after-provider-response"
SAFE_BEFORE_PUBLICATION = "before-publication"

Checkpoint = Optional[Callable[[str], None]]
IdFactory = Callable[[], str]


@dataclass(frozen=True)
class ToolDef:
    """One generation tool; name follows the make_<kind> convention."""

    name: str
    kind: ArtifactKind
    owner: AgentRole

    def describe(self) -> str:
        return f"{self.name}: produce a {self.kind.value.replace('_', ' ')} artifact"


def build_tool_registry() -> dict[AgentRole, dict[str, ToolDef]]:
    registry: dict[AgentRole, dict[str, ToolDef]] = {role: {} for role in AgentRole}
    for kind, owner in KIND_ROLE.items():
        tool = ToolDef(name=f"make_{kind.value}", kind=kind, owner=owner)
        registry[owner][tool.name] = tool
    return registry


_REGISTRY = build_tool_registry()


def tools_for(role: AgentRole) -> dict[str, ToolDef]:
    return dict(_REGISTRY.get(role, {}))


def resolve_tool(role: AgentRole, kind: ArtifactKind) -> ToolDef:
    """The tool `role` must use to produce `kind`; roles cannot reach across."""
    name = f"make_{kind.value}"
    tool = _REGISTRY.get(role, {}).get(name)
    if tool is None:
        raise NoSuchToolError(
            f"role {role.value!r} has no tool {name!r}; "
            f"{kind.value} belongs to {KIND_ROLE[kind].value}"
        )
    return tool


# --- output parsing --------------------------------------------------------


@dataclass(frozen=True)
class ParsedElement:
    """Provider-declared element before ids and image synthesis."""

    kind: str
    attributes: dict[str, str]
    text: Optional[str] = None
    image_prompt: Optional[str] = None


def _strip_fences(raw: str) -> str:
    text = raw.strip()
    if text.startswith("```"):
        lines = text.splitlines()
        if len(lines) >= 2 and lines[-1].strip().startswith("```"):
            text = "\n".join(lines[1:-1])
    return text.strip()


def parse_tool_output(raw: str) -> list[ParsedElement]:
    """Parse a provider reply into element declarations.

    Expected shape: a JSON array of objects, each carrying "kind", optional
    string-valued "attributes", and exactly one of "text" / "image_prompt".
    A fenced code block around the array is tolerated; anything else raises
    MalformedOutputError with a reason suitable for a corrective re-prompt.
    """
    text = _strip_fences(raw)
    try:
        data = json.loads(text)
    except json.JSONDecodeError:
        start, end = text.find("["), text.rfind("]")
        if start == -1 or end <= start:
            raise MalformedOutputError("reply is not JSON")
        try:
            data = json.loads(text[start : end + 1])
        except json.JSONDecodeError as exc:
            raise MalformedOutputError(f"reply is not valid JSON: {exc.msg}")
    if not isinstance(data, list):
        raise MalformedOutputError("top-level JSON value must be an array")
    if not data:
        raise MalformedOutputError("element array is empty")

    parsed: list[ParsedElement] = []
    for pos, item in enumerate(data):
        if not isinstance(item, dict):
            raise MalformedOutputError(f"item {pos} is not an object")
        kind = item.get("kind")
        if not isinstance(kind, str) or not kind:
            raise MalformedOutputError(f"item {pos} lacks a string 'kind'")
        text_value = item.get("text")
        image_prompt = item.get("image_prompt")
        has_text = isinstance(text_value, str) and bool(text_value.strip())
        has_image = isinstance(image_prompt, str) and bool(image_prompt.strip())
        if has_text == has_image:
            raise MalformedOutputError(
                f"item {pos} must carry exactly one of 'text'/'image_prompt'"
            )
        attrs_raw = item.get("attributes", {})
        if not isinstance(attrs_raw, dict):
            raise MalformedOutputError(f"item {pos}: 'attributes' must be an object")
        attributes: dict[str, str] = {}
        for key, value in attrs_raw.items():
            if not isinstance(key, str) or not isinstance(value, str):
                raise MalformedOutputError(
                    f"item {pos}: attribute keys and values must be strings"
                )
            attributes[key] = value
        parsed.append(
            ParsedElement(
                kind=kind,
                attributes=attributes,
                text=text_value.strip() if has_text else None,
                image_prompt=image_prompt.strip() if has_image else None,
            )
        )
    return parsed


# --- task execution --------------------------------------------------------


@dataclass(frozen=True)
class AgentResult:
    """Elements produced for one task, ready for validation."""

    spec: TaskSpec
    elements: tuple[Element, ...]
    raw_output: str
    retried: bool = False


def _mark(checkpoint: Checkpoint, label: str) -> None:
    if checkpoint is not None:
        checkpoint(label)


def _complete(
    provider: TextImageProvider,
    request: ProviderRequest,
    checkpoint: Checkpoint,
) -> str:
    _mark(checkpoint, SAFE_BEFORE_PROVIDER)
    reply = provider.complete(request)
    _mark(checkpoint, SAFE_AFTER_PROVIDER)
    return reply


def execute_task(
    spec: TaskSpec,
    provider: TextImageProvider,
    prompts: PromptLibrary,
    assets: AssetStore,
    id_factory: IdFactory,
    checkpoint: Checkpoint = None,
    temperature: float = 0.2,
) -> AgentResult:
    """Run one artifact task end to end.

    A malformed provider reply earns exactly one corrective re-prompt; a
    second failure propagates. Image elements are synthesized immediately,
    with the task's reference images forwarded to the image model.
    """
    if spec.task_kind is None:
        raise ValueError("execute_task requires an artifact kind; use run_direct_chat")
    resolve_tool(spec.target_role, spec.task_kind)

    references = tuple(
        item.image_ref for item in spec.context_payload if item.image_ref is not None
    )
    prompt = assemble_prompt(spec.target_role, spec.stage, spec, prompts)
    request = ProviderRequest(
        role=spec.target_role,
        stage=spec.stage,
        prompt=prompt,
        reference_images=references,
        task_kind=spec.task_kind,
        instruction=spec.instruction,
        temperature=temperature,
    )
    raw = _complete(provider, request, checkpoint)
    retried = False
    try:
        parsed = parse_tool_output(raw)
    except MalformedOutputError as first:
        correction = (
            f"{prompt}\n\n## Correction\n"
            f"The previous reply could not be used ({first.message}). "
            "Respond with only the JSON array of elements, nothing else."
        )
        retry_request = ProviderRequest(
            role=spec.target_role,
            stage=spec.stage,
            prompt=correction,
            reference_images=references,
            task_kind=spec.task_kind,
            instruction=spec.instruction,
            temperature=temperature,
        )
        raw = _complete(provider, retry_request, checkpoint)
        parsed = parse_tool_output(raw)  # second failure propagates
        retried = True

    elements: list[Element] = []
    for item in parsed:
        element_id = id_factory()
        if item.image_prompt is not None:
            ref = provider.generate_image(item.image_prompt, references, assets)
            elements.append(
                Element(
                    element_id=element_id,
                    kind=item.kind,
                    image_ref=ref,
                    attributes=item.attributes,
                )
            )
        else:
            elements.append(
                Element(
                    element_id=element_id,
                    kind=item.kind,
                    text=item.text,
                    attributes=item.attributes,
                )
            )
    return AgentResult(
        spec=spec, elements=tuple(elements), raw_output=raw, retried=retried
    )


def run_direct_chat(
    spec: TaskSpec,
    provider: TextImageProvider,
    prompts: PromptLibrary,
    checkpoint: Checkpoint = None,
    temperature: float = 0.2,
) -> str:
    """Free-form conversation with one specialized agent; no artifact output."""
    if spec.task_kind is not None:
        raise ValueError("direct chat takes no artifact kind")
    prompt = assemble_prompt(spec.target_role, spec.stage, spec, prompts)
    request = ProviderRequest(
        role=spec.target_role,
        stage=spec.stage,
        prompt=prompt,
        task_kind=None,
        instruction=spec.instruction,
        temperature=temperature,
    )
    return _complete(provider, request, checkpoint)


# --- parallel fan-out ------------------------------------------------------


@dataclass
class SlotOutcome:
    """Result or captured error for one fan-out slot."""

    index: int
    result: Optional[AgentResult] = None
    error: Optional[BaseException] = None

    @property
    def ok(self) -> bool:
        return self.error is None


def parallel_execute(
    tasks: Sequence[TaskSpec],
    runner: Callable[[int, TaskSpec], AgentResult],
    parallel_cap: int = 4,
) -> list[SlotOutcome]:
    """Run same-kind tasks concurrently, one slot per task.

    Outcomes come back in input order regardless of completion order, and a
    failure in one slot never disturbs the others: each slot's error is
    captured in its own outcome and the rest run to completion.
    """
    if not tasks:
        return []
    outcomes = [SlotOutcome(index=i) for i in range(len(tasks))]

    def _run(i: int, spec: TaskSpec) -> None:
        try:
            outcomes[i].result = runner(i, spec)
        except BaseException as exc:  # per-slot isolation, caller decides
            outcomes[i].error = exc

    if len(tasks) == 1 or parallel_cap <= 1:
        for i, spec in enumerate(tasks):
            _run(i, spec)
        return outcomes

    with ThreadPoolExecutor(max_workers=min(parallel_cap, len(tasks))) as pool:
        futures = [pool.submit(_run, i, spec) for i, spec in enumerate(tasks)]
        for future in futures:
            future.result()
    return outcomes
