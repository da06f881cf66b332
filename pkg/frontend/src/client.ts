/**
 * Thin fetch wrapper over the engine's HTTP API.
 *
 * Every method maps to exactly one endpoint; nothing here owns state. The
 * fetch function is injectable so tests can substitute a recording fake.
 */

import type {
  RequestStatusResponse,
  SessionEvent,
  SessionStateResponse,
  StageName,
  WireBlock,
  WireBlockDetail,
  WireBoard,
  WireSelection,
} from "./types.js";

/** Server-reported failure, carrying the error envelope's machine code. */
export class ApiError extends Error {
  readonly code: string;
  readonly status: number;

  constructor(status: number, code: string, message: string) {
    super(message);
    this.name = "ApiError";
    this.status = status;
    this.code = code;
  }
}

export type FetchLike = (
  url: string,
  init?: {
    method?: string;
    headers?: Record<string, string>;
    body?: string;
  },
) => Promise<{
  ok: boolean;
  status: number;
  json(): Promise<unknown>;
}>;

/** The subset of the API the browser client uses. */
export interface EngineClient {
  createSession(body?: Record<string, unknown>): Promise<{ session_id: string }>;
  getState(sessionId: string): Promise<SessionStateResponse>;
  postMessage(
    sessionId: string,
    text: string,
    selection?: WireSelection | null,
  ): Promise<{ request_id: string }>;
  requestStatus(
    sessionId: string,
    requestId: string,
  ): Promise<RequestStatusResponse>;
  cancelRequest(
    sessionId: string,
    requestId: string,
  ): Promise<RequestStatusResponse>;
  eventLog(sessionId: string, after?: number): Promise<SessionEvent[]>;
  board(sessionId: string, stage: StageName): Promise<WireBoard>;
  block(sessionId: string, blockId: string): Promise<WireBlockDetail>;
  setActiveVersion(
    sessionId: string,
    blockId: string,
    versionIndex: number,
  ): Promise<WireBlock>;
  setPinned(
    sessionId: string,
    blockId: string,
    pinned: boolean,
  ): Promise<WireBlock>;
  setCollapsed(
    sessionId: string,
    blockId: string,
    collapsed: boolean,
  ): Promise<WireBlock>;
  setPlacement(
    sessionId: string,
    blockId: string,
    x: number,
    y: number,
  ): Promise<unknown>;
  assetUrl(sessionId: string, ref: string): string;
}

export class HttpClient implements EngineClient {
  private readonly base: string;
  private readonly fetchFn: FetchLike;

  constructor(base: string, fetchFn?: FetchLike) {
    this.base = base.replace(/\/$/, "");
    this.fetchFn =
      fetchFn ?? ((url, init) => globalThis.fetch(url, init) as never);
  }

  private async request<T>(
    method: string,
    path: string,
    body?: unknown,
  ): Promise<T> {
    const init: Parameters<FetchLike>[1] = { method };
    if (body !== undefined) {
      init.headers = { "content-type": "application/json" };
      init.body = JSON.stringify(body);
    }
    const response = await this.fetchFn(this.base + path, init);
    const data = (await response.json()) as Record<string, unknown>;
    if (!response.ok) {
      const envelope = (data?.["error"] ?? {}) as Record<string, unknown>;
      throw new ApiError(
        response.status,
        String(envelope["code"] ?? "unknown"),
        String(envelope["message"] ?? `request failed (${response.status})`),
      );
    }
    return data as T;
  }

  createSession(body: Record<string, unknown> = {}) {
    return this.request<{ session_id: string }>("POST", "/sessions", body);
  }

  getState(sessionId: string) {
    return this.request<SessionStateResponse>(
      "GET",
      `/sessions/${sessionId}/state`,
    );
  }

  postMessage(
    sessionId: string,
    text: string,
    selection?: WireSelection | null,
  ) {
    const body: Record<string, unknown> = { text };
    if (selection) {
      body["selection"] = selection;
    }
    return this.request<{ request_id: string }>(
      "POST",
      `/sessions/${sessionId}/messages`,
      body,
    );
  }

  requestStatus(sessionId: string, requestId: string) {
    return this.request<RequestStatusResponse>(
      "GET",
      `/sessions/${sessionId}/requests/${requestId}`,
    );
  }

  cancelRequest(sessionId: string, requestId: string) {
    return this.request<RequestStatusResponse>(
      "POST",
      `/sessions/${sessionId}/requests/${requestId}/cancel`,
      {},
    );
  }

  eventLog(sessionId: string, after = -1) {
    return this.request<SessionEvent[]>(
      "GET",
      `/sessions/${sessionId}/events/log?after=${after}`,
    );
  }

  board(sessionId: string, stage: StageName) {
    return this.request<WireBoard>("GET", `/sessions/${sessionId}/boards/${stage}`);
  }

  block(sessionId: string, blockId: string) {
    return this.request<WireBlockDetail>(
      "GET",
      `/sessions/${sessionId}/blocks/${blockId}`,
    );
  }

  setActiveVersion(sessionId: string, blockId: string, versionIndex: number) {
    return this.request<WireBlock>(
      "POST",
      `/sessions/${sessionId}/blocks/${blockId}/active_version`,
      { version_index: versionIndex },
    );
  }

  setPinned(sessionId: string, blockId: string, pinned: boolean) {
    return this.request<WireBlock>(
      "POST",
      `/sessions/${sessionId}/blocks/${blockId}/pinned`,
      { pinned },
    );
  }

  setCollapsed(sessionId: string, blockId: string, collapsed: boolean) {
    return this.request<WireBlock>(
      "POST",
      `/sessions/${sessionId}/blocks/${blockId}/collapsed`,
      { collapsed },
    );
  }

  setPlacement(sessionId: string, blockId: string, x: number, y: number) {
    return this.request<unknown>(
      "POST",
      `/sessions/${sessionId}/blocks/${blockId}/placement`,
      { x, y },
    );
  }

  assetUrl(sessionId: string, ref: string): string {
    return `${this.base}/sessions/${sessionId}/assets/${ref}`;
  }
}
