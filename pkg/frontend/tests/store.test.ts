/**
 * Event-fold unit tests: the store turns an event sequence into client state
 * without ever inventing board content.
 */

import { beforeEach, describe, expect, it } from "vitest";

import { SessionStore } from "../src/store.js";
import type { SessionEvent } from "../src/types.js";

function event(
  seq: number,
  kind: SessionEvent["event_kind"],
  payload: Record<string, unknown>,
  agent = "core",
): SessionEvent {
  return {
    event_seq: seq,
    event_kind: kind,
    payload,
    agent,
    session_id: "sess-000001",
    created_at: "2030-01-01T00:00:00.000Z",
  };
}

let store: SessionStore;

beforeEach(() => {
  store = new SessionStore("sess-000001");
});

describe("chat folding", () => {
  it("appends chat events with speaker and text", () => {
    store.applyEvent(
      event(0, "chat-message", {
        speaker: "user",
        text: "hello",
        request_id: "req-000001",
      }),
    );
    store.applyEvent(
      event(1, "chat-message", {
        speaker: "assistant",
        text: "hi",
        request_id: "req-000001",
      }),
    );
    expect(store.state.chat.map((c) => [c.speaker, c.text])).toEqual([
      ["user", "hello"],
      ["assistant", "hi"],
    ]);
  });

  it("renders truncated chat payloads as a size notice", () => {
    store.applyEvent(
      event(0, "chat-message", {
        truncated: true,
        original_bytes: 98765,
        request_id: "req-000001",
      }),
    );
    expect(store.state.chat[0]?.text).toContain("98765");
  });

  it("ignores an event with an already-applied sequence", () => {
    const first = event(0, "chat-message", {
      speaker: "user",
      text: "once",
      request_id: "req-000001",
    });
    store.applyEvent(first);
    store.applyEvent(first);
    expect(store.state.chat.length).toBe(1);
  });
});

describe("publication folding", () => {
  const published = (seq: number, blockId: string, canonical = true) =>
    event(seq, "block-published", {
      mode: "new-root",
      kind: "story_concept",
      block_id: blockId,
      version_index: 0,
      canonical_changed: canonical,
      task_id: "task-000001",
      request_id: "req-000001",
    });

  it("creates a loading card on its home board and queues hydration", () => {
    store.applyEvent(published(0, "blk-000001"));
    const card = store.state.cards.get("blk-000001");
    expect(card?.stage).toBe("ideation");
    expect(card?.detail).toBeNull();
    expect(store.takePendingFetches()).toEqual(["blk-000001"]);
    expect(store.takePendingFetches()).toEqual([]);
  });

  it("tracks the latest canonical block per kind", () => {
    store.applyEvent(published(0, "blk-000001"));
    store.applyEvent(published(1, "blk-000002"));
    expect(store.state.canonical.get("story_concept")).toBe("blk-000002");
  });

  it("remembers the newest publication for auto-centering", () => {
    store.applyEvent(published(0, "blk-000001"));
    store.applyEvent(published(1, "blk-000002"));
    expect(store.state.newestBlockId).toBe("blk-000002");
  });

  it("merges mutation responses without losing placement", () => {
    store.integrateBlock({
      block_id: "blk-000001",
      stage: "ideation",
      kind: "story_concept",
      parent_id: null,
      versions: [],
      active_version: 0,
      pinned: false,
      collapsed: false,
      placement: [120, 80],
      lineage: ["blk-000001"],
    });
    // A plain block response (no placement) must not erase what we know.
    store.integrateBlock({
      block_id: "blk-000001",
      stage: "ideation",
      kind: "story_concept",
      parent_id: null,
      versions: [],
      active_version: 0,
      pinned: true,
      collapsed: false,
    });
    const detail = store.state.cards.get("blk-000001")?.detail;
    expect(detail?.pinned).toBe(true);
    expect(detail?.placement).toEqual([120, 80]);
  });
});

describe("turn state", () => {
  it("follows stage changes", () => {
    store.applyEvent(
      event(0, "stage-changed", {
        from_stage: "planning",
        to_stage: "ideation",
        request_id: "req-000001",
      }),
    );
    expect(store.state.stage).toBe("ideation");
  });

  it("shows specialist activity on the status line and clears it on DONE", () => {
    store.applyEvent(
      event(
        0,
        "agent-status",
        {
          state: "started",
          task_id: "task-000001",
          kind: "story_concept",
          request_id: "req-000001",
        },
        "ideation",
      ),
    );
    expect(store.state.statusLine).toContain("ideation");
    expect(store.state.statusLine).toContain("story concept");
    store.applyEvent(
      event(1, "done", { request_id: "req-000001", status: "done" }),
    );
    expect(store.state.statusLine).toBe("");
  });

  it("keeps the approval flag through the asking turn's DONE", () => {
    store.applyEvent(
      event(0, "approval-request", {
        request_id: "req-000001",
        question: "Proceed?",
      }),
    );
    store.applyEvent(
      event(1, "done", { request_id: "req-000001", status: "done" }),
    );
    expect(store.state.awaitingApproval).toBe(true);
    // The answering turn is a different request; its DONE clears the flag.
    store.applyEvent(
      event(2, "done", { request_id: "req-000002", status: "done" }),
    );
    expect(store.state.awaitingApproval).toBe(false);
  });

  it("clears the in-flight marker only for the matching request", () => {
    store.notePosted("req-000002");
    store.applyEvent(
      event(0, "done", { request_id: "req-000001", status: "done" }),
    );
    expect(store.state.inFlightRequestId).toBe("req-000002");
    store.applyEvent(
      event(1, "done", { request_id: "req-000002", status: "cancelled" }),
    );
    expect(store.state.inFlightRequestId).toBeNull();
  });

  it("records error payloads for display", () => {
    store.applyEvent(
      event(0, "error", {
        request_id: "req-000001",
        code: "provider-failure",
        message: "scripted fault",
      }),
    );
    expect(store.state.lastError?.code).toBe("provider-failure");
  });
});
