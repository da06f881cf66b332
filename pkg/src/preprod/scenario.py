"""Replayable conversation scenarios.

A scenario file bundles a canned provider program, an ordered list of
director actions, and expectations over the finished session. Selections are
written structurally (artifact kind + ordinal) because block ids only exist
at run time. The runner stops at the first divergence and reports it with
the step index, which makes a failing scenario diff readable.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path
from typing import Any, Mapping, Optional

from .clock import TickClock
from .config import EngineConfig
from .errors import EngineError, ScenarioMalformedError
from .model import (
    ArtifactKind,
    EventKind,
    Selection,
    Stage,
    StageStatus,
    stage_for_kind,
)
from .providers import ScriptedProvider
from .session import Session


def builtin_scenario_path(name: str) -> Path:
    """Path of a scenario shipped with the package (name without .json)."""
    root = resources.files("preprod") / "scenarios"
    candidate = Path(str(root / f"{name}.json"))
    if not candidate.exists():
        raise ScenarioMalformedError(f"no built-in scenario {name!r}")
    return candidate


def list_builtin_scenarios() -> list[str]:
    root = Path(str(resources.files("preprod") / "scenarios"))
    return sorted(p.stem for p in root.glob("*.json"))


def load_scenario(source: Path | str | Mapping[str, Any]) -> dict[str, Any]:
    if isinstance(source, Mapping):
        doc = dict(source)
    else:
        path = Path(source)
        try:
            doc = json.loads(path.read_text(encoding="utf-8"))
        except OSError as exc:
            raise ScenarioMalformedError(f"cannot read scenario {path}: {exc}")
        except json.JSONDecodeError as exc:
            raise ScenarioMalformedError(f"scenario {path} is not valid JSON: {exc}")
    if not isinstance(doc.get("name"), str) or not doc["name"]:
        raise ScenarioMalformedError("scenario needs a 'name'")
    if not isinstance(doc.get("provider"), dict):
        raise ScenarioMalformedError("scenario needs a 'provider' program")
    if not isinstance(doc.get("actions"), list) or not doc["actions"]:
        raise ScenarioMalformedError("scenario needs a non-empty 'actions' list")
    for index, action in enumerate(doc["actions"]):
        if not isinstance(action, dict) or "op" not in action:
            raise ScenarioMalformedError(f"action {index} needs an 'op'")
    return doc


@dataclass
class ScenarioReport:
    name: str
    ok: bool
    divergence: Optional[str]
    steps: list[dict[str, Any]] = field(default_factory=list)
    session: Optional[Session] = None

    def to_dict(self) -> dict[str, Any]:
        return {
            "name": self.name,
            "ok": self.ok,
            "divergence": self.divergence,
            "steps": self.steps,
        }


def resolve_structural_selection(
    session: Session, spec: Mapping[str, Any]
) -> Selection:
    """Turn {"kind", "ordinal", "elements"} into a concrete Selection.

    Blocks of the kind are ordered by block id (allocation order); elements
    are picked by element kind and ordinal within the chosen version.
    """
    kind = ArtifactKind(spec["kind"])
    board = session.project.board(stage_for_kind(kind))
    matches = sorted(
        (b for b in board.blocks.values() if b.kind is kind),
        key=lambda b: b.block_id,
    )
    if not matches:
        raise ScenarioMalformedError(f"no {kind.value} block exists to select")
    ordinal = int(spec.get("ordinal", 0))
    try:
        block = matches[ordinal]
    except IndexError:
        raise ScenarioMalformedError(
            f"only {len(matches)} {kind.value} block(s) exist; ordinal {ordinal}"
        )
    version_index = spec.get("version")
    if version_index is None:
        version_index = block.active_version
    version_index = int(version_index)
    if not (0 <= version_index < len(block.versions)):
        raise ScenarioMalformedError(
            f"{block.block_id} has no version {version_index}"
        )
    version = block.versions[version_index]
    element_ids: list[str] = []
    for el_spec in spec.get("elements", []):
        el_kind = el_spec["kind"]
        el_ordinal = int(el_spec.get("ordinal", 0))
        candidates = [el for el in version.elements if el.kind == el_kind]
        if el_ordinal >= len(candidates):
            raise ScenarioMalformedError(
                f"{block.block_id} v{version_index} has only {len(candidates)} "
                f"{el_kind} element(s); ordinal {el_ordinal}"
            )
        element_ids.append(candidates[el_ordinal].element_id)
    return Selection(
        block_id=block.block_id,
        version_index=version_index,
        element_ids=tuple(element_ids),
    )


def assistant_reply(session: Session, request_id: str) -> str:
    """Concatenated non-user chat output for one request."""
    texts = [
        e.payload.get("text", "")
        for e in session.get_events()
        if e.event_kind is EventKind.CHAT_MESSAGE
        and e.payload.get("request_id") == request_id
        and e.payload.get("speaker") != "user"
    ]
    return "\n".join(texts)


def observed_stage_sequence(session: Session) -> list[str]:
    sequence = [Stage.PLANNING.value]
    for event in session.get_events():
        if event.event_kind is EventKind.STAGE_CHANGED:
            sequence.append(event.payload["to_stage"])
    return sequence


def check_expectations(session: Session, expect: Mapping[str, Any]) -> Optional[str]:
    """First unmet expectation, or None."""
    if "stage_sequence" in expect:
        observed = observed_stage_sequence(session)
        if observed != list(expect["stage_sequence"]):
            return (
                f"stage sequence {observed} != expected {expect['stage_sequence']}"
            )
    for kind_name in expect.get("canonical", []):
        kind = ArtifactKind(kind_name)
        if session.project.progress.canonical.get(kind) is None:
            return f"no canonical {kind.value}"
    for branch in expect.get("branch_children", []):
        stage = Stage(branch["stage"])
        kind = ArtifactKind(branch["kind"])
        board = session.project.board(stage)
        if not any(
            b.kind is kind and b.parent_id is not None for b in board.blocks.values()
        ):
            return f"no {kind.value} branch child on the {stage.value} board"
    for kind_name, minimum in expect.get("min_blocks", {}).items():
        kind = ArtifactKind(kind_name)
        board = session.project.board(stage_for_kind(kind))
        count = sum(1 for b in board.blocks.values() if b.kind is kind)
        if count < int(minimum):
            return f"{count} {kind.value} block(s), expected at least {minimum}"
    for stage_name, status_name in expect.get("statuses", {}).items():
        stage = Stage(stage_name)
        wanted = StageStatus(status_name)
        actual = session.project.progress.stage_status[stage]
        if actual is not wanted:
            return f"{stage.value} status {actual.value}, expected {wanted.value}"
    return None


def _run_action(
    session: Session,
    action: Mapping[str, Any],
    out_dir: Optional[Path],
    step: dict[str, Any],
) -> Optional[str]:
    op = action["op"]

    if op in ("message", "cancel"):
        selection = None
        if action.get("selection"):
            selection = resolve_structural_selection(session, action["selection"])
            step["selection"] = selection.to_dict()
        if op == "cancel":
            session.arm_cancel_after(int(action["after_safe_points"]))
        request_id = session.post_message(action["text"], selection)
        record = session.wait(request_id, timeout=float(action.get("timeout", 60)))
        step["request_id"] = request_id
        step["status"] = record.status
        reply = assistant_reply(session, request_id)
        step["reply"] = reply
        expected = action.get(
            "expect_status", "cancelled" if op == "cancel" else "done"
        )
        if record.status != expected:
            detail = f"; error={record.error}" if record.error else ""
            return f"status {record.status!r}, expected {expected!r}{detail}"
        needle = action.get("reply_contains")
        if needle and needle not in reply:
            return f"reply {reply!r} does not contain {needle!r}"
        return None

    if op == "save":
        path = Path(action["path"])
        if out_dir is not None and not path.is_absolute():
            path = out_dir / path
        session.save(path)
        step["path"] = str(path)
        return None

    if op == "expect_state":
        if "stage" in action and session.current_stage.value != action["stage"]:
            return (
                f"stage {session.current_stage.value!r}, "
                f"expected {action['stage']!r}"
            )
        if "awaiting_approval" in action:
            awaiting = session.pending_proposal is not None
            if awaiting != bool(action["awaiting_approval"]):
                return f"awaiting_approval is {awaiting}"
        for kind_name in action.get("canonical", []):
            kind = ArtifactKind(kind_name)
            if session.project.progress.canonical.get(kind) is None:
                return f"no canonical {kind.value}"
        return None

    raise ScenarioMalformedError(f"unknown action op {op!r}")


def run_scenario(
    source: Path | str | Mapping[str, Any],
    out_dir: Optional[Path] = None,
    clock=None,
) -> ScenarioReport:
    """Run one scenario in-process against a fresh session."""
    doc = load_scenario(source)
    config = EngineConfig().with_overrides(doc.get("config", {}))
    provider = ScriptedProvider.from_dict(doc["provider"])
    session = Session(
        doc.get("session_id", "sess-000001"),
        provider,
        config=config,
        clock=clock or TickClock(),
    )
    steps: list[dict[str, Any]] = []
    divergence: Optional[str] = None
    for index, action in enumerate(doc["actions"]):
        step: dict[str, Any] = {"index": index, "op": action["op"]}
        try:
            problem = _run_action(session, action, out_dir, step)
        except ScenarioMalformedError:
            raise
        except (EngineError, TimeoutError, ValueError) as exc:
            problem = f"{type(exc).__name__}: {exc}"
        steps.append(step)
        if problem is not None:
            divergence = f"step {index} ({action['op']}): {problem}"
            break
    if divergence is None and "expect" in doc:
        problem = check_expectations(session, doc["expect"])
        if problem is not None:
            divergence = f"final expectations: {problem}"
    return ScenarioReport(
        name=doc["name"],
        ok=divergence is None,
        divergence=divergence,
        steps=steps,
        session=session,
    )
