"""Session runtime: one director conversation driving one project.

Each director message becomes a request processed by a worker thread; a
session admits one in-flight request at a time. The worker snapshots the
full mutable state up front and restores it wholesale on fault or
cancellation, so a request either lands completely or not at all. Progress
is reported through an append-only event log with strictly increasing
sequence numbers; subscribers replay from any sequence and always see the
same gapless stream.
"""

from __future__ import annotations

import json
import threading
from dataclasses import dataclass, field
from typing import Any, Iterator, Optional

from .agents import (
    SAFE_AFTER_PROVIDER,
    SAFE_BEFORE_PROVIDER,
    SAFE_BEFORE_PUBLICATION,
    execute_task,
    parallel_execute,
    run_direct_chat,
)
from .assets import AssetStore
from .boards import Project, save_project
from .clock import TickClock
from .config import EngineConfig
from .core import (
    DecisionAction,
    TaskRequest,
    TurnPlan,
    build_task_spec,
    interpret_message,
    plan_turn,
    publish_result,
    refresh_progress,
    revised_spec,
    suggest_next_step,
    validate_result,
)
from .errors import (
    BusyError,
    ChannelAlreadyOpenError,
    EngineError,
    LivenessCeilingError,
    NoSuchRequestError,
    RequestCancelledError,
    StaleSelectionError,
    UnknownSessionError,
)
from .memory import (
    ChunkStore,
    ContextWindow,
    EntryKind,
    RetrievalTrace,
    WindowEntry,
    chunk_transcript,
    retrieve,
)
from .model import (
    AgentRole,
    ArtifactKind,
    ContextItem,
    EventKind,
    IntentMode,
    PublicationIntent,
    Selection,
    SessionEvent,
    Stage,
    TaskSpec,
    element_schema,
)
from .prompts import PromptLibrary
from .providers import ProviderRequest, TextImageProvider


@dataclass
class RequestRecord:
    """Lifecycle record for one posted message."""

    request_id: str
    status: str = "running"  # running | done | failed | cancelled
    error: Optional[dict[str, Any]] = None
    safe_points: list[str] = field(default_factory=list)
    events_emitted: int = 0

    def to_dict(self) -> dict[str, Any]:
        return {
            "request_id": self.request_id,
            "status": self.status,
            "error": self.error,
        }


@dataclass(frozen=True)
class StoredProposal:
    """A plan awaiting director approval, with the context it was made in."""

    plan: TurnPlan
    user_text: str
    selection: Optional[Selection]


@dataclass
class TaskOutcome:
    text: str
    exhausted: bool = False


class Session:
    """One conversation-scoped workspace over a project."""

    def __init__(
        self,
        session_id: str,
        provider: TextImageProvider,
        config: Optional[EngineConfig] = None,
        clock=None,
        prompts: Optional[PromptLibrary] = None,
        project: Optional[Project] = None,
    ):
        self.session_id = session_id
        self.provider = provider
        self.config = config or EngineConfig()
        # Tick clock by default: scripted runs must be byte-stable.
        self.clock = clock or TickClock()
        self.project = project or Project(clock=self.clock)
        self.project.clock = self.clock
        self.prompts = prompts or PromptLibrary.load(self.config.prompts_dir)

        self.current_stage = Stage.PLANNING
        self.open_channel: Optional[AgentRole] = None
        self.pending_proposal: Optional[StoredProposal] = None

        self.windows: dict[AgentRole, ContextWindow] = {
            role: ContextWindow(
                role, self.config.window_max_entries, self.config.window_max_chars
            )
            for role in AgentRole
        }
        self.transcript: list[WindowEntry] = []
        self.chunk_store = ChunkStore()
        self.retrieval_traces: list[RetrievalTrace] = []

        self.events: list[SessionEvent] = []
        self._events_cond = threading.Condition()
        self._state_lock = threading.RLock()
        self._busy = False
        self._active: Optional[str] = None
        self._cancel_flag = False
        self._armed_cancel: Optional[int] = None
        self._current_record: Optional[RequestRecord] = None
        self.requests: dict[str, RequestRecord] = {}
        self._threads: dict[str, threading.Thread] = {}

    # -- events --------------------------------------------------------------

    def _emit(self, kind: EventKind, agent: AgentRole, payload: dict[str, Any]) -> None:
        encoded = json.dumps(payload, ensure_ascii=False)
        if len(encoded) > self.config.event_payload_cap:
            payload = {
                "truncated": True,
                "original_bytes": len(encoded),
                "request_id": payload.get("request_id"),
            }
        with self._events_cond:
            event = SessionEvent(
                event_seq=len(self.events),
                event_kind=kind,
                payload=payload,
                agent=agent,
                session_id=self.session_id,
                created_at=self.clock.now(),
            )
            self.events.append(event)
            self._events_cond.notify_all()
        record = self._current_record
        if record is None or record.status != "running":
            return
        record.events_emitted += 1
        # Terminal events stay exempt so the abort itself can be reported.
        if kind in (EventKind.ERROR, EventKind.DONE):
            return
        if record.events_emitted > self.config.event_ceiling:
            raise LivenessCeilingError(
                f"request {record.request_id} exceeded the "
                f"{self.config.event_ceiling}-event ceiling"
            )

    def get_events(self, after_seq: int = -1) -> list[SessionEvent]:
        with self._events_cond:
            return [e for e in self.events if e.event_seq > after_seq]

    def stream_events(
        self,
        after_seq: int = -1,
        poll_timeout: float = 0.25,
        stop: Optional[threading.Event] = None,
    ) -> Iterator[Optional[SessionEvent]]:
        """Yield events with seq > after_seq as they arrive.

        Yields None when `poll_timeout` elapses with nothing new, so callers
        can send keepalives or check their own exit condition; a set `stop`
        event ends the stream.
        """
        next_seq = after_seq + 1
        while stop is None or not stop.is_set():
            with self._events_cond:
                if len(self.events) <= next_seq:
                    self._events_cond.wait(timeout=poll_timeout)
                batch = self.events[next_seq:]
            if not batch:
                yield None
                continue
            for event in batch:
                yield event
                next_seq = event.event_seq + 1

    # -- request lifecycle ---------------------------------------------------

    def post_message(self, text: str, selection: Optional[Selection] = None) -> str:
        """Queue one director message; returns the request id immediately."""
        if not text or not text.strip():
            raise ValueError("message must be non-empty")
        with self._state_lock:
            if self._busy:
                raise BusyError(
                    f"request {self._active} is still running; one at a time"
                )
            if selection is not None:
                self._check_selection(selection)
            request_id = self.project.ids.next("req")
            record = RequestRecord(request_id=request_id)
            self.requests[request_id] = record
            self._busy = True
            self._active = request_id
            self._cancel_flag = False
            self._current_record = record
        thread = threading.Thread(
            target=self._run_request,
            args=(record, text, selection),
            name=f"{self.session_id}-{request_id}",
            daemon=True,
        )
        self._threads[request_id] = thread
        thread.start()
        return request_id

    def _check_selection(self, selection: Selection) -> None:
        block = self.project.find_block(selection.block_id)
        if block is None:
            raise StaleSelectionError(f"block {selection.block_id} does not exist")
        if not (0 <= selection.version_index < len(block.versions)):
            raise StaleSelectionError(
                f"block {selection.block_id} has no version {selection.version_index}"
            )
        version = block.versions[selection.version_index]
        for eid in selection.element_ids:
            if version.element(eid) is None:
                raise StaleSelectionError(
                    f"element {eid} not in {selection.block_id} "
                    f"v{selection.version_index}"
                )

    def cancel(self, request_id: str) -> str:
        """Request cooperative cancellation; returns the observed status."""
        with self._state_lock:
            record = self.requests.get(request_id)
            if record is None:
                raise NoSuchRequestError(f"no request {request_id}")
            if record.status == "running" and self._active == request_id:
                self._cancel_flag = True
                return "cancelling"
            return record.status

    def request_status(self, request_id: str) -> RequestRecord:
        record = self.requests.get(request_id)
        if record is None:
            raise NoSuchRequestError(f"no request {request_id}")
        return record

    def wait(self, request_id: str, timeout: float = 30.0) -> RequestRecord:
        """Block until the request finishes; for tests and the CLI client."""
        thread = self._threads.get(request_id)
        if thread is not None:
            thread.join(timeout)
        record = self.request_status(request_id)
        if record.status == "running":
            raise TimeoutError(f"request {request_id} still running after {timeout}s")
        return record

    @property
    def busy(self) -> bool:
        return self._busy

    # -- snapshots -----------------------------------------------------------

    def _snapshot(self) -> dict[str, Any]:
        return {
            "doc": self.project.to_document(),
            "assets": self.project.assets.snapshot(),
            "stage": self.current_stage,
            "channel": self.open_channel,
            "proposal": self.pending_proposal,
            "windows": {r.value: w.to_dict() for r, w in self.windows.items()},
            "transcript": [e.to_dict() for e in self.transcript],
            "chunks": self.chunk_store.to_dict(),
            "traces": list(self.retrieval_traces),
        }

    def _restore(self, snap: dict[str, Any]) -> None:
        assets = AssetStore()
        assets.restore(snap["assets"])
        self.project = Project.from_document(snap["doc"], clock=self.clock, assets=assets)
        self.current_stage = snap["stage"]
        self.open_channel = snap["channel"]
        self.pending_proposal = snap["proposal"]
        self.windows = {
            AgentRole(r): ContextWindow.from_dict(w)
            for r, w in snap["windows"].items()
        }
        self.transcript = [WindowEntry.from_dict(e) for e in snap["transcript"]]
        self.chunk_store = ChunkStore.from_dict(snap["chunks"])
        self.retrieval_traces = list(snap["traces"])

    # -- worker --------------------------------------------------------------

    def arm_cancel_after(self, safe_points: int) -> None:
        """Deterministic cancellation hook for tests and scenarios: the next
        request self-cancels once it has crossed `safe_points` safe points."""
        if safe_points < 1:
            raise ValueError("safe_points must be >= 1")
        self._armed_cancel = safe_points

    def _checkpoint_for(self, record: RequestRecord):
        def checkpoint(label: str) -> None:
            record.safe_points.append(label)
            if (
                self._armed_cancel is not None
                and len(record.safe_points) >= self._armed_cancel
            ):
                self._cancel_flag = True
            if self._cancel_flag:
                raise RequestCancelledError(
                    f"request {record.request_id} cancelled at {label}"
                )

        return checkpoint

    def _note(self, kind: EntryKind, text: str, role: AgentRole = AgentRole.CORE) -> None:
        entry = WindowEntry(kind=kind, text=text, timestamp=self.clock.now())
        self.windows[role].append(entry)
        if role is AgentRole.CORE:
            self.transcript.append(entry)

    def _run_request(
        self, record: RequestRecord, text: str, selection: Optional[Selection]
    ) -> None:
        request_id = record.request_id
        snapshot = self._snapshot()
        checkpoint = self._checkpoint_for(record)
        try:
            self._emit(
                EventKind.CHAT_MESSAGE,
                AgentRole.CORE,
                {"speaker": "user", "text": text, "request_id": request_id},
            )
            self._note(EntryKind.MESSAGE, f"user: {text}")
            reply = self._dispatch(request_id, text, selection, checkpoint)
            self._maintain_memory()
            if reply is not None:
                self._emit(
                    EventKind.CHAT_MESSAGE,
                    AgentRole.CORE,
                    {"speaker": "assistant", "text": reply, "request_id": request_id},
                )
                self._note(EntryKind.MESSAGE, f"assistant: {reply}")
            record.status = "done"
            self._emit(
                EventKind.DONE,
                AgentRole.CORE,
                {"request_id": request_id, "status": "done"},
            )
        except RequestCancelledError as exc:
            self._restore(snapshot)
            record.status = "cancelled"
            record.error = exc.to_dict()
            self._emit(
                EventKind.ERROR, AgentRole.CORE, {"request_id": request_id, **exc.to_dict()}
            )
            self._emit(
                EventKind.DONE,
                AgentRole.CORE,
                {"request_id": request_id, "status": "cancelled"},
            )
        except EngineError as exc:
            self._restore(snapshot)
            record.status = "failed"
            record.error = exc.to_dict()
            self._emit(
                EventKind.ERROR, AgentRole.CORE, {"request_id": request_id, **exc.to_dict()}
            )
            self._emit(
                EventKind.DONE,
                AgentRole.CORE,
                {"request_id": request_id, "status": "failed"},
            )
        except Exception as exc:  # unexpected bug: still roll back, still report
            self._restore(snapshot)
            record.status = "failed"
            record.error = {"code": "internal", "message": str(exc), "details": {}}
            self._emit(
                EventKind.ERROR, AgentRole.CORE, {"request_id": request_id, **record.error}
            )
            self._emit(
                EventKind.DONE,
                AgentRole.CORE,
                {"request_id": request_id, "status": "failed"},
            )
        finally:
            with self._state_lock:
                self._busy = False
                self._active = None
                self._cancel_flag = False
                self._armed_cancel = None
                self._current_record = None

    def _maintain_memory(self) -> None:
        chunk_transcript(
            self.transcript,
            self.chunk_store,
            chunk_size=self.config.chunk_size,
            keep_recent=self.config.keep_recent,
        )

    # -- turn logic ----------------------------------------------------------

    def _dispatch(
        self,
        request_id: str,
        text: str,
        selection: Optional[Selection],
        checkpoint,
    ) -> Optional[str]:
        if self.open_channel is not None:
            interpretation = interpret_message(text, self.current_stage)
            if interpretation.close_channel:
                closed = self.open_channel
                self.open_channel = None
                self._emit(
                    EventKind.AGENT_STATUS,
                    AgentRole.CORE,
                    {
                        "state": "channel-closed",
                        "role": closed.value,
                        "request_id": request_id,
                    },
                )
                return "Channel closed; the director's assistant is back in charge."
            return self._direct_chat(request_id, text, selection, checkpoint)

        if self.pending_proposal is not None:
            proposal = self.pending_proposal
            interpretation = interpret_message(text, self.current_stage)
            if interpretation.affirmative:
                self.pending_proposal = None
                return self._execute_plan(
                    request_id,
                    proposal.plan,
                    proposal.user_text,
                    proposal.selection,
                    checkpoint,
                )
            if interpretation.negative:
                self.pending_proposal = None
                return "Understood, holding off. " + suggest_next_step(
                    self.project.progress, self.config
                )
            self.pending_proposal = None
            fresh = self._fresh_turn(request_id, text, selection, checkpoint)
            if fresh is None:
                return None
            return "Setting the earlier proposal aside. " + fresh

        return self._fresh_turn(request_id, text, selection, checkpoint)

    def _fresh_turn(
        self,
        request_id: str,
        text: str,
        selection: Optional[Selection],
        checkpoint,
    ) -> Optional[str]:
        interpretation = interpret_message(text, self.current_stage)
        selection_kind: Optional[ArtifactKind] = None
        if selection is not None:
            block = self.project.find_block(selection.block_id)
            selection_kind = block.kind if block is not None else None
        plan = plan_turn(
            interpretation,
            self.current_stage,
            self.project.progress,
            self.config,
            selection_kind,
        )
        return self._execute_plan(request_id, plan, text, selection, checkpoint)

    def _execute_plan(
        self,
        request_id: str,
        plan: TurnPlan,
        text: str,
        selection: Optional[Selection],
        checkpoint,
    ) -> Optional[str]:
        action = plan.action

        if action is DecisionAction.SET_BRIEF:
            self.project.progress = self.project.progress.with_brief(text.strip())
            refresh_progress(self.project, self.config)
            return "Project brief captured. " + suggest_next_step(
                self.project.progress, self.config
            )

        if action is DecisionAction.ANSWER:
            if plan.reply:
                return plan.reply
            return self._core_chat(text, checkpoint)

        if action is DecisionAction.OPEN_CHANNEL:
            if self.open_channel is not None:
                raise ChannelAlreadyOpenError(
                    f"a channel to the {self.open_channel.value} agent is already open"
                )
            self.open_channel = plan.channel_role
            self._emit(
                EventKind.AGENT_STATUS,
                AgentRole.CORE,
                {
                    "state": "channel-open",
                    "role": plan.channel_role.value,
                    "request_id": request_id,
                },
            )
            return plan.reply

        if action is DecisionAction.CLOSE_CHANNEL:
            if self.open_channel is None:
                return "No direct channel is open."
            closed = self.open_channel
            self.open_channel = None
            self._emit(
                EventKind.AGENT_STATUS,
                AgentRole.CORE,
                {
                    "state": "channel-closed",
                    "role": closed.value,
                    "request_id": request_id,
                },
            )
            return plan.reply

        if action is DecisionAction.SWITCH_STAGE:
            self._switch_stage(plan.target_stage, request_id)
            return (
                f"Now in the {self.current_stage.value} stage. "
                + suggest_next_step(self.project.progress, self.config)
            )

        if action is DecisionAction.ASK_APPROVAL:
            approved_plan = TurnPlan(
                action=DecisionAction.DELEGATE,
                target_stage=plan.target_stage,
                explicit_stage=True,
                tasks=plan.tasks,
                notices=plan.notices,
            )
            self.pending_proposal = StoredProposal(
                plan=approved_plan, user_text=text, selection=selection
            )
            self._emit(
                EventKind.APPROVAL_REQUEST,
                AgentRole.CORE,
                {
                    "request_id": request_id,
                    "proposal": approved_plan.to_dict(),
                    "question": plan.reply,
                },
            )
            return plan.reply

        # DELEGATE
        if plan.target_stage is not None and plan.target_stage is not self.current_stage:
            self._switch_stage(plan.target_stage, request_id)
        outcomes: list[TaskOutcome] = []
        for task_request in plan.tasks:
            outcome = self._run_single(
                request_id, task_request, text, selection, checkpoint
            )
            outcomes.append(outcome)
            if outcome.exhausted:
                break
        parts = list(plan.notices) + [o.text for o in outcomes]
        parts.append(suggest_next_step(self.project.progress, self.config))
        return " ".join(parts)

    def _switch_stage(self, target: Stage, request_id: str) -> None:
        if target is None or target is self.current_stage:
            return
        payload = {
            "from_stage": self.current_stage.value,
            "to_stage": target.value,
            "request_id": request_id,
        }
        self.current_stage = target
        self._emit(EventKind.STAGE_CHANGED, AgentRole.CORE, payload)
        self._note(EntryKind.MESSAGE, f"stage changed to {target.value}")

    # -- task execution ------------------------------------------------------

    def _task_id_factory(self, task_id: str):
        counter = {"n": 0}

        def next_id() -> str:
            counter["n"] += 1
            return f"{task_id}-el-{counter['n']:03d}"

        return next_id

    def _with_recall(self, spec: TaskSpec, query: str) -> TaskSpec:
        """Append long-term recall to a task's context payload."""
        if not self.chunk_store.chunks:
            return spec
        hits = retrieve(
            self.chunk_store,
            query,
            k=self.config.retrieval_k,
            trace_log=self.retrieval_traces,
        )
        extra = tuple(
            ContextItem(label=f"recalled:{hit.chunk.chunk_id}", text=hit.chunk.summary)
            for hit in hits
            if hit.chunk.summary
        )
        if not extra:
            return spec
        return TaskSpec(
            task_id=spec.task_id,
            target_role=spec.target_role,
            task_kind=spec.task_kind,
            instruction=spec.instruction,
            context_payload=spec.context_payload + extra,
            publication_intent=spec.publication_intent,
            stage=spec.stage,
        )

    def _run_single(
        self,
        request_id: str,
        task_request: TaskRequest,
        text: str,
        selection: Optional[Selection],
        checkpoint,
    ) -> TaskOutcome:
        schema = element_schema(task_request.kind)
        if (
            task_request.count
            and task_request.count > 1
            and schema.specs[0].max_count == 1
        ):
            return self._run_fanout(request_id, task_request, text, selection, checkpoint)

        task_id = self.project.ids.next("task")
        spec = build_task_spec(
            self.project, self.config, task_id, task_request, text, selection
        )
        spec = self._with_recall(spec, text)
        kind = task_request.kind
        self._emit(
            EventKind.AGENT_STATUS,
            spec.target_role,
            {
                "state": "started",
                "task_id": task_id,
                "kind": kind.value,
                "request_id": request_id,
            },
        )
        self._note(
            EntryKind.INTER_AGENT,
            f"delegated {task_id} ({kind.value}) to {spec.target_role.value}",
        )
        self._note(EntryKind.INTER_AGENT, f"task {task_id}: {spec.instruction}",
                   role=spec.target_role)

        result, report, rounds = self._execute_with_revisions(
            request_id, spec, checkpoint
        )
        label = kind.value.replace("_", " ")
        if not report.approved:
            self._emit(
                EventKind.AGENT_STATUS,
                spec.target_role,
                {
                    "state": "exhausted",
                    "task_id": task_id,
                    "rounds": rounds,
                    "request_id": request_id,
                },
            )
            self._note(
                EntryKind.INTER_AGENT,
                f"task {task_id} exhausted after {rounds} round(s); nothing published",
            )
            return TaskOutcome(
                text=(
                    f"{label}: not approved after {rounds} round(s); nothing was "
                    f"published. Issues: {report.feedback_text()}"
                ),
                exhausted=True,
            )

        return TaskOutcome(
            text=self._publish(request_id, task_id, spec.target_role, result, checkpoint)
        )

    def _execute_with_revisions(self, request_id: str, spec: TaskSpec, checkpoint):
        """Attempt rounds 1..max_revision_rounds; each retry carries the
        previous round's feedback. Returns the last result and report."""
        result = None
        report = None
        current = spec
        rounds = 0
        for round_number in range(1, self.config.max_revision_rounds + 1):
            rounds = round_number
            if round_number > 1:
                current = revised_spec(spec, report, round_number)
                self._emit(
                    EventKind.AGENT_STATUS,
                    spec.target_role,
                    {
                        "state": "revision-requested",
                        "task_id": spec.task_id,
                        "round": round_number,
                        "request_id": request_id,
                    },
                )
            result = execute_task(
                current,
                self.provider,
                self.prompts,
                self.project.assets,
                id_factory=self._task_id_factory(f"{spec.task_id}-r{round_number}"),
                checkpoint=checkpoint,
            )
            report = validate_result(self.project, result)
            self._emit(
                EventKind.AGENT_STATUS,
                spec.target_role,
                {
                    "state": "validated",
                    "task_id": spec.task_id,
                    "round": round_number,
                    "verdict": "approve" if report.approved else "request-revision",
                    "request_id": request_id,
                },
            )
            if report.approved:
                break
        return result, report, rounds

    def _publish(
        self, request_id: str, task_id: str, role: AgentRole, result, checkpoint
    ) -> str:
        checkpoint(SAFE_BEFORE_PUBLICATION)
        effect = publish_result(self.project, result)
        refresh_progress(self.project, self.config)
        event_kind = (
            EventKind.BLOCK_UPDATED
            if effect.mode is IntentMode.OVERWRITE_ARTIFACT
            else EventKind.BLOCK_PUBLISHED
        )
        self._emit(
            event_kind,
            role,
            {**effect.to_dict(), "task_id": task_id, "request_id": request_id},
        )
        label = effect.kind.value.replace("_", " ")
        self._note(
            EntryKind.OUTPUT,
            f"published {effect.kind.value} as {effect.block_id} "
            f"v{effect.version_index} ({effect.mode.value})",
        )
        if effect.mode is IntentMode.OVERWRITE_ARTIFACT:
            return f"{label}: updated {effect.block_id} to v{effect.version_index}."
        return f"{label}: published {effect.block_id} ({effect.mode.value})."

    def _run_fanout(
        self,
        request_id: str,
        task_request: TaskRequest,
        text: str,
        selection: Optional[Selection],
        checkpoint,
    ) -> TaskOutcome:
        """N parallel variants of a single-artifact kind, one block each."""
        count = task_request.count or 1
        specs: list[TaskSpec] = []
        for slot in range(count):
            task_id = self.project.ids.next("task")
            slot_text = f"{text} (variant {slot + 1} of {count})"
            spec = build_task_spec(
                self.project,
                self.config,
                task_id,
                TaskRequest(kind=task_request.kind),
                slot_text,
                selection,
            )
            specs.append(self._with_recall(spec, text))
            self._emit(
                EventKind.AGENT_STATUS,
                spec.target_role,
                {
                    "state": "started",
                    "task_id": task_id,
                    "kind": task_request.kind.value,
                    "slot": slot,
                    "request_id": request_id,
                },
            )

        def runner(slot: int, spec: TaskSpec):
            return execute_task(
                spec,
                self.provider,
                self.prompts,
                self.project.assets,
                id_factory=self._task_id_factory(f"{spec.task_id}-r1"),
                checkpoint=checkpoint,
            )

        outcomes = parallel_execute(specs, runner, self.config.parallel_cap)
        for outcome in outcomes:
            if outcome.error is not None:
                raise outcome.error

        texts: list[str] = []
        for slot, outcome in enumerate(outcomes):
            result = outcome.result
            spec = specs[slot]
            report = validate_result(self.project, result)
            round_number = 1
            while not report.approved and round_number < self.config.max_revision_rounds:
                round_number += 1
                retry = revised_spec(spec, report, round_number)
                self._emit(
                    EventKind.AGENT_STATUS,
                    spec.target_role,
                    {
                        "state": "revision-requested",
                        "task_id": spec.task_id,
                        "round": round_number,
                        "request_id": request_id,
                    },
                )
                result = execute_task(
                    retry,
                    self.provider,
                    self.prompts,
                    self.project.assets,
                    id_factory=self._task_id_factory(f"{spec.task_id}-r{round_number}"),
                    checkpoint=checkpoint,
                )
                report = validate_result(self.project, result)
            self._emit(
                EventKind.AGENT_STATUS,
                spec.target_role,
                {
                    "state": "validated",
                    "task_id": spec.task_id,
                    "round": round_number,
                    "verdict": "approve" if report.approved else "request-revision",
                    "request_id": request_id,
                },
            )
            if not report.approved:
                texts.append(
                    f"variant {slot + 1}: not approved after {round_number} "
                    "round(s); nothing was published"
                )
                continue
            texts.append(
                self._publish(request_id, spec.task_id, spec.target_role, result, checkpoint)
            )
        return TaskOutcome(text=" ".join(texts))

    # -- chat paths ----------------------------------------------------------

    def _direct_chat(
        self,
        request_id: str,
        text: str,
        selection: Optional[Selection],
        checkpoint,
    ) -> Optional[str]:
        """Forward the director's message down the open channel; the
        specialist's reply is streamed under its own role, not rewrapped."""
        role = self.open_channel
        assert role is not None
        task_id = self.project.ids.next("task")
        items: list[ContextItem] = []
        if selection is not None:
            items.extend(self.project.resolve_selection(selection))
        if self.project.progress.project_brief:
            items.append(
                ContextItem(
                    label="project-brief", text=self.project.progress.project_brief
                )
            )
        spec = TaskSpec(
            task_id=task_id,
            target_role=role,
            task_kind=None,
            instruction=text,
            context_payload=tuple(items),
            publication_intent=PublicationIntent(IntentMode.NEW_ROOT),
            stage=self.current_stage,
        )
        self._emit(
            EventKind.AGENT_STATUS,
            role,
            {"state": "chatting", "task_id": task_id, "request_id": request_id},
        )
        reply = run_direct_chat(spec, self.provider, self.prompts, checkpoint)
        self._emit(
            EventKind.CHAT_MESSAGE,
            role,
            {"speaker": role.value, "text": reply, "request_id": request_id},
        )
        self._note(EntryKind.INTER_AGENT, f"[channel] director to {role.value}: {text}")
        self._note(EntryKind.INTER_AGENT, f"[channel] {role.value}: {reply}")
        self._note(EntryKind.MESSAGE, f"director: {text}", role=role)
        self._note(EntryKind.MESSAGE, f"reply: {reply}", role=role)
        return None

    def _core_chat(self, text: str, checkpoint) -> str:
        """Conversational reply from the core agent itself."""
        lines = [
            "## Role",
            self.prompts.base(),
            "",
            f"## Stage: {self.current_stage.value}",
            self.prompts.stage(self.current_stage),
            "",
            "## Task",
            text,
        ]
        if self.project.progress.project_brief:
            lines += [
                "",
                "## Context",
                f"- project-brief: {self.project.progress.project_brief}",
            ]
        request = ProviderRequest(
            role=AgentRole.CORE,
            stage=self.current_stage,
            prompt="\n".join(lines),
            instruction=text,
        )
        checkpoint(SAFE_BEFORE_PROVIDER)
        reply = self.provider.complete(request)
        checkpoint(SAFE_AFTER_PROVIDER)
        return reply

    # -- state export --------------------------------------------------------

    def describe(self) -> dict[str, Any]:
        return {
            "session_id": self.session_id,
            "stage": self.current_stage.value,
            "busy": self._busy,
            "open_channel": self.open_channel.value if self.open_channel else None,
            "awaiting_approval": self.pending_proposal is not None,
            "progress": self.project.progress.to_dict(),
            "event_count": len(self.events),
        }

    def export_log(self) -> dict[str, Any]:
        """Full interaction record: events, transcript, retrieval traces."""
        return {
            "session_id": self.session_id,
            "events": [e.to_dict() for e in self.events],
            "transcript": [e.to_dict() for e in self.transcript],
            "retrieval": [
                {"query": t.query, "expanded": t.expanded, "ranking": t.ranking}
                for t in self.retrieval_traces
            ],
        }

    def save(self, path) -> None:
        save_project(path, self.project.to_document(), self.project.assets)


class SessionService:
    """Registry of live sessions; the FastAPI layer and CLI drive this."""

    def __init__(self):
        self._lock = threading.Lock()
        self._counter = 0
        self.sessions: dict[str, Session] = {}

    def create_session(
        self,
        provider: TextImageProvider,
        config: Optional[EngineConfig] = None,
        clock=None,
        prompts: Optional[PromptLibrary] = None,
        project: Optional[Project] = None,
    ) -> Session:
        with self._lock:
            self._counter += 1
            session_id = f"sess-{self._counter:06d}"
            session = Session(
                session_id,
                provider,
                config=config,
                clock=clock,
                prompts=prompts,
                project=project,
            )
            self.sessions[session_id] = session
            return session

    def get(self, session_id: str) -> Session:
        session = self.sessions.get(session_id)
        if session is None:
            raise UnknownSessionError(f"no session {session_id}")
        return session
