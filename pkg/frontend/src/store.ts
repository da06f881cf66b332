/**
 * Session store: folds the server's event stream into client state.
 *
 * The store applies events in sequence order and never invents board data.
 * Publication events carry only the block id; the full content (versions,
 * placement, lineage) is hydrated from the block endpoint, so board state
 * is always something the server said, fetched through the public API.
 */

import type {
  AgentStatusPayload,
  ArtifactKindName,
  ChatPayload,
  DonePayload,
  ErrorPayload,
  PublicationPayload,
  SessionEvent,
  StageChangePayload,
  StageName,
  WireBlock,
  WireBlockDetail,
} from "./types.js";
import { KIND_STAGE, isTruncated } from "./types.js";

export interface ChatItem {
  seq: number;
  speaker: string;
  text: string;
  requestId: string;
}

/** One block on a board; `detail` is null until hydration returns. */
export interface CardState {
  blockId: string;
  kind: ArtifactKindName;
  stage: StageName;
  detail: WireBlockDetail | null;
  /** Sequence of the publication that most recently touched this block. */
  touchedSeq: number;
}

export interface StoreState {
  sessionId: string;
  stage: StageName;
  chat: ChatItem[];
  /** Most recent specialist activity, for the status line. */
  statusLine: string;
  awaitingApproval: boolean;
  /** Request whose turn asked the pending approval question. */
  approvalRequestId: string | null;
  /** Request posted by this client that has not reached DONE yet. */
  inFlightRequestId: string | null;
  /** True once cancel was asked for the in-flight request. */
  cancelPending: boolean;
  cards: Map<string, CardState>;
  canonical: Map<ArtifactKindName, string>;
  lastError: ErrorPayload | null;
  lastSeq: number;
  /** Block id of the newest publication, for auto-centering its board. */
  newestBlockId: string | null;
}

const STATE_LABEL: Record<string, string> = {
  started: "working",
  validated: "validated",
  "revision-requested": "revising",
  exhausted: "gave up",
  "channel-open": "direct channel open",
  "channel-closed": "direct channel closed",
};

function statusText(payload: AgentStatusPayload, agent: string): string {
  const label = STATE_LABEL[payload.state] ?? payload.state;
  const parts = [`${payload.role ?? agent}: ${label}`];
  if (payload.kind) {
    parts.push(payload.kind.replace(/_/g, " "));
  }
  if (payload.verdict) {
    parts.push(`(${payload.verdict})`);
  }
  return parts.join(" ");
}

export class SessionStore {
  readonly state: StoreState;
  private pendingFetches: string[] = [];

  constructor(sessionId: string) {
    this.state = {
      sessionId,
      stage: "planning",
      chat: [],
      statusLine: "",
      awaitingApproval: false,
      approvalRequestId: null,
      inFlightRequestId: null,
      cancelPending: false,
      cards: new Map(),
      canonical: new Map(),
      lastError: null,
      lastSeq: -1,
      newestBlockId: null,
    };
  }

  /** Mark a request this client just posted; cleared by its DONE event. */
  notePosted(requestId: string): void {
    this.state.inFlightRequestId = requestId;
    this.state.cancelPending = false;
  }

  noteCancelRequested(): void {
    this.state.cancelPending = true;
  }

  /** Block ids that need hydration via the block endpoint, drained once. */
  takePendingFetches(): string[] {
    const batch = this.pendingFetches;
    this.pendingFetches = [];
    return batch;
  }

  /**
   * Merge a server response into the block's card. Full detail responses
   * carry placement and lineage; plain block responses (from the small
   * mutation endpoints) keep whatever geometry we already know.
   */
  integrateBlock(data: WireBlock & Partial<WireBlockDetail>): void {
    const existing = this.state.cards.get(data.block_id);
    const detail: WireBlockDetail = {
      ...data,
      placement: data.placement ?? existing?.detail?.placement ?? null,
      lineage: data.lineage ?? existing?.detail?.lineage ?? [data.block_id],
    };
    const card: CardState = existing ?? {
      blockId: detail.block_id,
      kind: detail.kind,
      stage: detail.stage,
      detail: null,
      touchedSeq: -1,
    };
    card.detail = detail;
    card.kind = detail.kind;
    card.stage = detail.stage;
    this.state.cards.set(detail.block_id, card);
  }

  applyEvent(event: SessionEvent): void {
    if (event.event_seq <= this.state.lastSeq) {
      return; // replays are idempotent
    }
    this.state.lastSeq = event.event_seq;
    const payload = event.payload;
    switch (event.event_kind) {
      case "chat-message": {
        if (isTruncated(payload)) {
          this.state.chat.push({
            seq: event.event_seq,
            speaker: "assistant",
            text: `[message too large to stream: ${String(payload["original_bytes"])} bytes]`,
            requestId: String(payload["request_id"] ?? ""),
          });
          break;
        }
        const chat = payload as unknown as ChatPayload;
        this.state.chat.push({
          seq: event.event_seq,
          speaker: chat.speaker,
          text: chat.text,
          requestId: chat.request_id,
        });
        break;
      }
      case "block-published":
      case "block-updated": {
        if (isTruncated(payload)) {
          break;
        }
        const publication = payload as unknown as PublicationPayload;
        const existing = this.state.cards.get(publication.block_id);
        const card: CardState = existing ?? {
          blockId: publication.block_id,
          kind: publication.kind,
          stage: KIND_STAGE[publication.kind],
          detail: null,
          touchedSeq: -1,
        };
        card.touchedSeq = event.event_seq;
        this.state.cards.set(publication.block_id, card);
        if (publication.canonical_changed) {
          this.state.canonical.set(publication.kind, publication.block_id);
        }
        this.state.newestBlockId = publication.block_id;
        this.pendingFetches.push(publication.block_id);
        break;
      }
      case "stage-changed": {
        const change = payload as unknown as StageChangePayload;
        this.state.stage = change.to_stage;
        break;
      }
      case "agent-status": {
        const status = payload as unknown as AgentStatusPayload;
        this.state.statusLine = statusText(status, event.agent);
        break;
      }
      case "approval-request": {
        this.state.awaitingApproval = true;
        this.state.approvalRequestId = String(payload["request_id"] ?? "");
        break;
      }
      case "error": {
        this.state.lastError = payload as unknown as ErrorPayload;
        break;
      }
      case "done": {
        const done = payload as unknown as DonePayload;
        // The asking turn's own DONE arrives right after the approval
        // question; only the answering turn (a different request) clears it.
        if (done.request_id !== this.state.approvalRequestId) {
          this.state.awaitingApproval = false;
          this.state.approvalRequestId = null;
        }
        this.state.statusLine = "";
        if (done.request_id === this.state.inFlightRequestId) {
          this.state.inFlightRequestId = null;
          this.state.cancelPending = false;
        }
        break;
      }
    }
  }
}
