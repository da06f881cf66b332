"""Shared builders used across the test suite."""

from __future__ import annotations

from typing import Any, Optional, Sequence

from preprod.clock import TickClock
from preprod.config import EngineConfig
from preprod.model import ArtifactKind, Element, element_schema
from preprod.providers import ScriptedProvider
from preprod.session import Session


def valid_elements(
    kind: ArtifactKind, prefix: str = "el", extra: int = 0
) -> list[Element]:
    """Minimal conforming element list for a kind.

    `extra` adds that many repeats to every unbounded element kind, which
    keeps counts within schema limits for bounded ones.
    """
    out: list[Element] = []
    n = 0
    for spec in element_schema(kind).specs:
        count = spec.min_count
        if spec.max_count is None:
            count += extra
        for _ in range(count):
            n += 1
            attrs = {a: f"{a}-{n}" for a in spec.required_attributes}
            element_id = f"{prefix}-{n:03d}"
            if spec.content == "text":
                out.append(
                    Element(
                        element_id,
                        spec.kind,
                        text=f"{kind.value} {spec.kind} {n}",
                        attributes=attrs,
                    )
                )
            else:
                out.append(
                    Element(
                        element_id,
                        spec.kind,
                        image_ref=f"img-{kind.value}-{n}.png",
                        attributes=attrs,
                    )
                )
    return out


def tool_payload(
    kind: ArtifactKind,
    extra: int = 0,
    attributes: Optional[dict[str, dict[str, str]]] = None,
) -> list[dict[str, Any]]:
    """JSON element array a scripted provider can return for make_<kind>.

    `attributes` overrides required-attribute values per element kind.
    """
    items: list[dict[str, Any]] = []
    n = 0
    for spec in element_schema(kind).specs:
        count = spec.min_count
        if spec.max_count is None:
            count += extra
        for _ in range(count):
            n += 1
            attrs = {a: f"{a} {n}" for a in spec.required_attributes}
            if attributes and spec.kind in attributes:
                attrs.update(attributes[spec.kind])
            item: dict[str, Any] = {"kind": spec.kind, "attributes": attrs}
            if spec.content == "text":
                item["text"] = f"{kind.value} {spec.kind} {n}"
            else:
                item["image_prompt"] = f"{kind.value} image {n}"
            items.append(item)
    return items


def rule(
    *,
    output_json: Any = None,
    output: Optional[str] = None,
    role: Optional[str] = None,
    task_kind: Optional[str] = None,
    contains: Optional[str] = None,
    delay_ms: int = 0,
    fault: Optional[str] = None,
    max_uses: Optional[int] = None,
) -> dict[str, Any]:
    data: dict[str, Any] = {}
    if output_json is not None:
        data["output_json"] = output_json
    if output is not None:
        data["output"] = output
    if role is not None:
        data["role"] = role
    if task_kind is not None:
        data["task_kind"] = task_kind
    if contains is not None:
        data["contains"] = contains
    if delay_ms:
        data["delay_ms"] = delay_ms
    if fault is not None:
        data["fault"] = fault
    if max_uses is not None:
        data["max_uses"] = max_uses
    return data


def kind_rule(kind: ArtifactKind, **kwargs: Any) -> dict[str, Any]:
    """Rule that answers make_<kind> calls with a conforming payload."""
    extra = kwargs.pop("extra", 0)
    attributes = kwargs.pop("attributes", None)
    return rule(
        task_kind=kind.value,
        output_json=tool_payload(kind, extra=extra, attributes=attributes),
        **kwargs,
    )


def scripted(*rules: dict[str, Any]) -> ScriptedProvider:
    return ScriptedProvider.from_dict({"rules": list(rules)})


def make_session(
    *rules: dict[str, Any],
    config: Optional[EngineConfig] = None,
    session_id: str = "sess-test",
) -> Session:
    return Session(
        session_id=session_id,
        provider=scripted(*rules),
        config=config or EngineConfig(),
        clock=TickClock(),
    )


def run_message(session: Session, text: str, selection=None, timeout: float = 30.0):
    """Post one message and wait for the worker to finish."""
    request_id = session.post_message(text, selection=selection)
    return session.wait(request_id, timeout=timeout)


def events_of_kind(session: Session, kind) -> list:
    value = kind.value if hasattr(kind, "value") else kind
    return [e for e in session.get_events() if e.event_kind.value == value]


def state_fingerprint(session: Session) -> dict[str, Any]:
    """Everything a request may mutate, in comparable form.

    The request-id counter is excluded: ids are never reused, so the
    counter advances even when the request itself is undone.
    """
    doc = session.project.to_document()
    doc = {**doc, "ids": {k: v for k, v in doc["ids"].items() if k != "req"}}
    return {
        "doc": doc,
        "assets": session.project.assets.snapshot(),
        "stage": session.current_stage,
        "channel": session.open_channel,
        "has_proposal": session.pending_proposal is not None,
        "windows": {r.value: w.to_dict() for r, w in session.windows.items()},
        "transcript": [e.to_dict() for e in session.transcript],
        "chunks": session.chunk_store.to_dict(),
        "trace_count": len(session.retrieval_traces),
    }
