/**
 * Application controller: one session, one store, one view, one DOM mount.
 *
 * Everything side-effectful is injected (HTTP client, event-source factory),
 * so the controller runs identically under tests with fakes and in the
 * browser with the real network.
 */

import type { EngineClient } from "./client.js";
import { mountApp, type UiHandle, type UiHandlers } from "./dom.js";
import { buildAppModel } from "./render.js";
import {
  openEventStream,
  type EventSourceFactory,
  type StreamHandle,
} from "./stream.js";
import { SessionStore } from "./store.js";
import type { SessionEvent, StageName } from "./types.js";
import {
  clearSelection,
  collapseAllExceptPinned,
  initialViewState,
  selectBlock,
  toggleElement,
  toggleExpanded,
  type ViewState,
} from "./view.js";

export interface AppOptions {
  client: EngineClient;
  sessionId: string;
  root: HTMLElement;
  /** URL prefix for the SSE endpoint; empty means same origin. */
  base?: string;
  /** Injectable for tests; defaults to the browser EventSource. */
  eventSourceFactory?: EventSourceFactory;
  retryDelayMs?: number;
}

export class AppController {
  readonly store: SessionStore;
  readonly view: ViewState;
  private readonly client: EngineClient;
  private readonly sessionId: string;
  private readonly ui: UiHandle;
  private stream: StreamHandle | null = null;
  private readonly base: string;
  private readonly eventSourceFactory?: EventSourceFactory;
  private readonly retryDelayMs?: number;

  constructor(options: AppOptions) {
    this.client = options.client;
    this.sessionId = options.sessionId;
    this.base = options.base ?? "";
    this.store = new SessionStore(options.sessionId);
    this.view = initialViewState();
    if (options.eventSourceFactory) {
      this.eventSourceFactory = options.eventSourceFactory;
    }
    if (options.retryDelayMs !== undefined) {
      this.retryDelayMs = options.retryDelayMs;
    }
    this.ui = mountApp(options.root, this.handlers());
    this.update();
  }

  /** Re-render from current state; cheap enough to call after any change. */
  update(): void {
    this.ui.update(buildAppModel(this.store.state, this.view));
  }

  /** Apply one event, hydrate any blocks it introduced, re-render. */
  async applyEvent(event: SessionEvent): Promise<void> {
    this.store.applyEvent(event);
    await this.hydratePending();
    this.update();
  }

  private async hydratePending(): Promise<void> {
    for (const blockId of this.store.takePendingFetches()) {
      try {
        this.store.integrateBlock(
          await this.client.block(this.sessionId, blockId),
        );
      } catch {
        // The block may have been rolled back after the event was logged;
        // leave the card in its loading state rather than crash the fold.
      }
    }
  }

  /** Subscribe to the live stream (resuming after anything already seen). */
  connect(): void {
    this.stream?.close();
    const handlers: Parameters<typeof openEventStream>[0] = {
      base: this.base,
      sessionId: this.sessionId,
      after: this.store.state.lastSeq,
      onEvent: (event) => {
        void this.applyEvent(event);
      },
      onStatus: (status) => {
        this.view.connection = status;
        this.update();
      },
    };
    if (this.eventSourceFactory) {
      handlers.factory = this.eventSourceFactory;
    }
    if (this.retryDelayMs !== undefined) {
      handlers.retryDelayMs = this.retryDelayMs;
    }
    this.stream = openEventStream(handlers);
  }

  disconnect(): void {
    this.stream?.close();
    this.stream = null;
    this.view.connection = "idle";
  }

  async send(text: string): Promise<void> {
    const selection = this.view.selection;
    try {
      const accepted = await this.client.postMessage(
        this.sessionId,
        text,
        selection,
      );
      this.store.notePosted(accepted.request_id);
      // The message is on its way; the selection has done its job.
      clearSelection(this.view);
    } catch (error) {
      this.store.state.lastError = {
        request_id: "",
        code: error instanceof Error ? error.name : "send-failed",
        message: error instanceof Error ? error.message : String(error),
      };
    }
    this.update();
  }

  async stop(): Promise<void> {
    const requestId = this.store.state.inFlightRequestId;
    if (!requestId || this.store.state.cancelPending) {
      return;
    }
    this.store.noteCancelRequested();
    this.update();
    try {
      await this.client.cancelRequest(this.sessionId, requestId);
    } catch {
      // Already settled — its DONE event will clear the in-flight flag.
      this.store.state.cancelPending = false;
    }
    this.update();
  }

  async switchVersion(blockId: string, versionIndex: number): Promise<void> {
    const block = await this.client.setActiveVersion(
      this.sessionId,
      blockId,
      versionIndex,
    );
    this.store.integrateBlock(block);
    this.update();
  }

  private handlers(): UiHandlers {
    return {
      onSend: (text) => {
        void this.send(text);
      },
      onStop: () => {
        void this.stop();
      },
      onAnswerApproval: (answer) => {
        void this.send(answer === "yes" ? "Yes." : "No.");
      },
      onSelectVersion: (blockId, versionIndex) => {
        void this.switchVersion(blockId, versionIndex);
      },
      onSelectBlock: (blockId, versionIndex) => {
        selectBlock(this.view, blockId, versionIndex);
        this.update();
      },
      onToggleElement: (blockId, elementId) => {
        if (this.view.selection?.block_id !== blockId) {
          const active =
            this.store.state.cards.get(blockId)?.detail?.active_version ?? 0;
          selectBlock(this.view, blockId, active);
        }
        toggleElement(this.view, elementId);
        this.update();
      },
      onTogglePinned: (blockId, pinned) => {
        void this.client
          .setPinned(this.sessionId, blockId, pinned)
          .then((block) => {
            this.store.integrateBlock(block);
            this.update();
          });
      },
      onToggleCollapsed: (blockId, collapsed) => {
        void this.client
          .setCollapsed(this.sessionId, blockId, collapsed)
          .then((block) => {
            this.store.integrateBlock(block);
            this.update();
          });
      },
      onToggleExpanded: (stage: StageName) => {
        toggleExpanded(this.view, stage);
        this.update();
      },
      onCollapseAll: () => {
        void collapseAllExceptPinned(
          this.client,
          this.sessionId,
          this.store.state.cards.values(),
        ).then((updated) => {
          for (const block of updated) {
            this.store.integrateBlock(block);
          }
          this.update();
        });
      },
      assetUrl: (ref) => this.client.assetUrl(this.sessionId, ref),
    };
  }
}
