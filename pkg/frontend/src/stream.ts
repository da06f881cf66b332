/**
 * Live event subscription over server-sent events.
 *
 * The server names each SSE frame after the event kind and sets the frame id
 * to the event's sequence number, so resuming is just "subscribe again from
 * the last sequence we saw". The browser's EventSource handles transient
 * retries itself (sending Last-Event-ID); this wrapper additionally rebuilds
 * the connection from scratch when the source gives up entirely, asking only
 * for events after the last applied sequence — no gaps, no duplicates.
 */

import { EVENT_KINDS, type SessionEvent } from "./types.js";

export type StreamStatus = "connecting" | "open" | "retrying";

/** What this module needs from EventSource, substitutable in tests. */
export interface EventSourceLike {
  addEventListener(type: string, listener: (event: MessageEventLike) => void): void;
  close(): void;
  readyState: number;
}

export interface MessageEventLike {
  data?: string;
}

export type EventSourceFactory = (url: string) => EventSourceLike;

const CLOSED = 2;

export interface StreamOptions {
  base: string;
  sessionId: string;
  /** Resume after this sequence; -1 replays from the start. */
  after?: number;
  onEvent: (event: SessionEvent) => void;
  onStatus?: (status: StreamStatus) => void;
  factory?: EventSourceFactory;
  /** Delay before rebuilding a fully-closed connection. */
  retryDelayMs?: number;
  /** Scheduler hook; tests pass an immediate or manual version. */
  schedule?: (fn: () => void, delayMs: number) => void;
}

export interface StreamHandle {
  close(): void;
  lastSeq(): number;
}

export function openEventStream(options: StreamOptions): StreamHandle {
  const factory =
    options.factory ??
    ((url: string) => new EventSource(url) as unknown as EventSourceLike);
  const schedule =
    options.schedule ?? ((fn, delayMs) => setTimeout(fn, delayMs));
  const retryDelayMs = options.retryDelayMs ?? 1000;

  let lastSeq = options.after ?? -1;
  let source: EventSourceLike | null = null;
  let closed = false;

  const notify = (status: StreamStatus) => {
    if (!closed) {
      options.onStatus?.(status);
    }
  };

  const connect = () => {
    if (closed) {
      return;
    }
    notify("connecting");
    const url = `${options.base}/sessions/${options.sessionId}/events?after=${lastSeq}`;
    source = factory(url);
    source.addEventListener("open", () => notify("open"));
    source.addEventListener("error", () => {
      if (closed || source === null) {
        return;
      }
      if (source.readyState === CLOSED) {
        source = null;
        notify("retrying");
        schedule(connect, retryDelayMs);
      } else {
        notify("retrying");
      }
    });
    for (const kind of EVENT_KINDS) {
      source.addEventListener(kind, (message) => {
        if (closed || !message.data) {
          return;
        }
        const event = JSON.parse(message.data) as SessionEvent;
        if (event.event_seq <= lastSeq) {
          return; // duplicate from an overlapping retry
        }
        lastSeq = event.event_seq;
        options.onEvent(event);
      });
    }
  };

  connect();
  return {
    close() {
      closed = true;
      source?.close();
      source = null;
    },
    lastSeq: () => lastSeq,
  };
}
