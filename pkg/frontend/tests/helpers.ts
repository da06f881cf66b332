/**
 * Shared test support: fixture loading and a recording fake client.
 *
 * Fixtures under tests/fixtures/ were captured from a live server run of the
 * built-in golden scenario (scripts/record_fixtures.py), so every shape here
 * is something the real API produced.
 */

import { readFileSync } from "node:fs";
import { dirname, join } from "node:path";
import { fileURLToPath } from "node:url";

import { ApiError, type EngineClient } from "../src/client.js";
import type {
  RequestStatusResponse,
  SessionEvent,
  SessionStateResponse,
  StageName,
  WireBlock,
  WireBlockDetail,
  WireBoard,
  WireSelection,
} from "../src/types.js";

// Resolved via fileURLToPath on the bare module URL: the bundler rewrites the
// `new URL(..., import.meta.url)` form against the DOM base URL, which breaks
// filesystem reads under the browser-like test environment.
const FIXTURES_DIR = join(dirname(fileURLToPath(import.meta.url)), "fixtures");

function readFixture<T>(relative: string): T {
  return JSON.parse(readFileSync(join(FIXTURES_DIR, relative), "utf-8")) as T;
}

export interface GoldenFixtures {
  events: SessionEvent[];
  boards: Record<string, WireBoard>;
  blocks: Record<string, WireBlockDetail>;
  state: SessionStateResponse;
}

export function loadGolden(): GoldenFixtures {
  return {
    events: readFixture("golden/events.json"),
    boards: readFixture("golden/boards.json"),
    blocks: readFixture("golden/blocks.json"),
    state: readFixture("golden/state.json"),
  };
}

export interface VersionsFixtures {
  block: WireBlockDetail;
  events: SessionEvent[];
}

export function loadVersions(): VersionsFixtures {
  return {
    block: readFixture("versions/block.json"),
    events: readFixture("versions/events.json"),
  };
}

export interface RecordedCall {
  method: string;
  args: unknown[];
}

/**
 * In-memory EngineClient over fixture data. Mutation endpoints behave like
 * the server's (switching versions really moves `active_version`); every
 * call is recorded for assertions. Posted messages stay in flight until the
 * test feeds the matching DONE event, mirroring a slow scripted turn.
 */
export class FakeClient implements EngineClient {
  readonly calls: RecordedCall[] = [];
  private readonly blocks = new Map<string, WireBlockDetail>();
  private readonly boards: Record<string, WireBoard>;
  private readonly events: SessionEvent[];
  private requestCounter = 0;

  constructor(options?: {
    blocks?: Record<string, WireBlockDetail>;
    boards?: Record<string, WireBoard>;
    events?: SessionEvent[];
  }) {
    for (const [blockId, detail] of Object.entries(options?.blocks ?? {})) {
      this.blocks.set(blockId, structuredClone(detail));
    }
    this.boards = structuredClone(options?.boards ?? {});
    this.events = structuredClone(options?.events ?? []);
  }

  calledMethods(): string[] {
    return this.calls.map((call) => call.method);
  }

  callsTo(method: string): RecordedCall[] {
    return this.calls.filter((call) => call.method === method);
  }

  private record(method: string, ...args: unknown[]): void {
    this.calls.push({ method, args });
  }

  private mustBlock(blockId: string): WireBlockDetail {
    const block = this.blocks.get(blockId);
    if (!block) {
      throw new ApiError(404, "unknown-block", `no block ${blockId}`);
    }
    return block;
  }

  /** Server block responses omit placement/lineage; details include them. */
  private asWireBlock(detail: WireBlockDetail): WireBlock {
    const { placement: _p, lineage: _l, ...block } = structuredClone(detail);
    return block;
  }

  createSession(): Promise<{ session_id: string }> {
    this.record("createSession");
    return Promise.resolve({ session_id: "sess-000001" });
  }

  getState(sessionId: string): Promise<SessionStateResponse> {
    this.record("getState", sessionId);
    return Promise.reject(new ApiError(404, "unknown-session", "not seeded"));
  }

  postMessage(
    sessionId: string,
    text: string,
    selection?: WireSelection | null,
  ): Promise<{ request_id: string }> {
    this.record("postMessage", sessionId, text, selection ?? null);
    this.requestCounter += 1;
    return Promise.resolve({
      request_id: `req-${String(this.requestCounter).padStart(6, "0")}`,
    });
  }

  requestStatus(
    sessionId: string,
    requestId: string,
  ): Promise<RequestStatusResponse> {
    this.record("requestStatus", sessionId, requestId);
    return Promise.resolve({
      request_id: requestId,
      status: "running",
      error: null,
    });
  }

  cancelRequest(
    sessionId: string,
    requestId: string,
  ): Promise<RequestStatusResponse> {
    this.record("cancelRequest", sessionId, requestId);
    return Promise.resolve({
      request_id: requestId,
      status: "cancelling",
      error: null,
    });
  }

  eventLog(sessionId: string, after = -1): Promise<SessionEvent[]> {
    this.record("eventLog", sessionId, after);
    return Promise.resolve(
      this.events.filter((event) => event.event_seq > after),
    );
  }

  board(sessionId: string, stage: StageName): Promise<WireBoard> {
    this.record("board", sessionId, stage);
    const board = this.boards[stage];
    if (!board) {
      throw new ApiError(404, "unknown-board", `no board ${stage}`);
    }
    return Promise.resolve(structuredClone(board));
  }

  block(sessionId: string, blockId: string): Promise<WireBlockDetail> {
    this.record("block", sessionId, blockId);
    return Promise.resolve(structuredClone(this.mustBlock(blockId)));
  }

  setActiveVersion(
    sessionId: string,
    blockId: string,
    versionIndex: number,
  ): Promise<WireBlock> {
    this.record("setActiveVersion", sessionId, blockId, versionIndex);
    const block = this.mustBlock(blockId);
    if (versionIndex < 0 || versionIndex >= block.versions.length) {
      throw new ApiError(400, "bad-index", `no version ${versionIndex}`);
    }
    block.active_version = versionIndex;
    return Promise.resolve(this.asWireBlock(block));
  }

  setPinned(
    sessionId: string,
    blockId: string,
    pinned: boolean,
  ): Promise<WireBlock> {
    this.record("setPinned", sessionId, blockId, pinned);
    const block = this.mustBlock(blockId);
    block.pinned = pinned;
    return Promise.resolve(this.asWireBlock(block));
  }

  setCollapsed(
    sessionId: string,
    blockId: string,
    collapsed: boolean,
  ): Promise<WireBlock> {
    this.record("setCollapsed", sessionId, blockId, collapsed);
    const block = this.mustBlock(blockId);
    block.collapsed = collapsed;
    return Promise.resolve(this.asWireBlock(block));
  }

  setPlacement(
    sessionId: string,
    blockId: string,
    x: number,
    y: number,
  ): Promise<unknown> {
    this.record("setPlacement", sessionId, blockId, x, y);
    const block = this.mustBlock(blockId);
    block.placement = [x, y];
    return Promise.resolve({ block_id: blockId, placement: [x, y] });
  }

  assetUrl(sessionId: string, ref: string): string {
    return `/sessions/${sessionId}/assets/${ref}`;
  }
}

/** Flush queued microtasks and zero-delay timers from async handlers. */
export async function flushAsync(): Promise<void> {
  await new Promise((resolve) => setTimeout(resolve, 0));
  await new Promise((resolve) => setTimeout(resolve, 0));
}
