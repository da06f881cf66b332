/**
 * Event-stream subscription: ordered delivery, duplicate suppression, and
 * seamless resume from the last applied sequence after a dropped connection.
 */

import { describe, expect, it } from "vitest";

import {
  openEventStream,
  type EventSourceLike,
  type MessageEventLike,
  type StreamStatus,
} from "../src/stream.js";
import type { SessionEvent } from "../src/types.js";

class FakeEventSource implements EventSourceLike {
  readyState = 0;
  private listeners = new Map<string, Array<(event: MessageEventLike) => void>>();

  constructor(readonly url: string) {}

  addEventListener(type: string, listener: (event: MessageEventLike) => void) {
    const existing = this.listeners.get(type) ?? [];
    existing.push(listener);
    this.listeners.set(type, existing);
  }

  close() {
    this.readyState = 2;
  }

  emit(type: string, data?: string) {
    for (const listener of this.listeners.get(type) ?? []) {
      listener(data === undefined ? {} : { data });
    }
  }

  emitEvent(event: SessionEvent) {
    this.emit(event.event_kind, JSON.stringify(event));
  }

  /** Simulate the browser giving up on the connection entirely. */
  fail() {
    this.readyState = 2;
    this.emit("error");
  }
}

function chatEvent(seq: number): SessionEvent {
  return {
    event_seq: seq,
    event_kind: "chat-message",
    payload: { speaker: "assistant", text: `message ${seq}`, request_id: "req-000001" },
    agent: "core",
    session_id: "sess-000001",
    created_at: "2030-01-01T00:00:00.000Z",
  };
}

interface Harness {
  sources: FakeEventSource[];
  received: number[];
  statuses: StreamStatus[];
  pendingRetries: Array<() => void>;
  handle: ReturnType<typeof openEventStream>;
}

function subscribe(after = -1): Harness {
  const harness: Partial<Harness> = {
    sources: [],
    received: [],
    statuses: [],
    pendingRetries: [],
  };
  harness.handle = openEventStream({
    base: "",
    sessionId: "sess-000001",
    after,
    factory: (url) => {
      const source = new FakeEventSource(url);
      harness.sources?.push(source);
      return source;
    },
    schedule: (fn) => harness.pendingRetries?.push(fn),
    onEvent: (event) => harness.received?.push(event.event_seq),
    onStatus: (status) => harness.statuses?.push(status),
  });
  return harness as Harness;
}

describe("event stream", () => {
  it("subscribes from the requested sequence and delivers in order", () => {
    const harness = subscribe(-1);
    expect(harness.sources[0]?.url).toBe(
      "/sessions/sess-000001/events?after=-1",
    );
    harness.sources[0]?.emit("open");
    harness.sources[0]?.emitEvent(chatEvent(0));
    harness.sources[0]?.emitEvent(chatEvent(1));
    expect(harness.received).toEqual([0, 1]);
    expect(harness.handle.lastSeq()).toBe(1);
    expect(harness.statuses).toEqual(["connecting", "open"]);
  });

  it("drops duplicate sequences from overlapping replays", () => {
    const harness = subscribe(-1);
    harness.sources[0]?.emitEvent(chatEvent(0));
    harness.sources[0]?.emitEvent(chatEvent(0));
    harness.sources[0]?.emitEvent(chatEvent(1));
    expect(harness.received).toEqual([0, 1]);
  });

  it("rebuilds a dead connection asking only for what it missed", () => {
    const harness = subscribe(-1);
    harness.sources[0]?.emitEvent(chatEvent(0));
    harness.sources[0]?.emitEvent(chatEvent(1));

    harness.sources[0]?.fail();
    expect(harness.statuses).toContain("retrying");
    expect(harness.pendingRetries.length).toBe(1);

    harness.pendingRetries[0]?.();
    expect(harness.sources.length).toBe(2);
    expect(harness.sources[1]?.url).toBe(
      "/sessions/sess-000001/events?after=1",
    );

    // The server replays 0..3; only the new events come through.
    for (const seq of [0, 1, 2, 3]) {
      harness.sources[1]?.emitEvent(chatEvent(seq));
    }
    expect(harness.received).toEqual([0, 1, 2, 3]);
  });

  it("stops delivering after close()", () => {
    const harness = subscribe(-1);
    harness.sources[0]?.emitEvent(chatEvent(0));
    harness.handle.close();
    harness.sources[0]?.emitEvent(chatEvent(1));
    expect(harness.received).toEqual([0]);
    expect(harness.sources[0]?.readyState).toBe(2);
  });

  it("does not resurrect a closed stream on a late error", () => {
    const harness = subscribe(-1);
    harness.handle.close();
    harness.sources[0]?.fail();
    expect(harness.pendingRetries.length).toBe(0);
  });
});
