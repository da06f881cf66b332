// @vitest-environment jsdom
/**
 * Stop button: while a posted message is still being worked on, the composer
 * is locked and Stop is offered; pressing it sends a cancel for the in-flight
 * request, and the input unlocks once the cancelled turn's events arrive.
 *
 * The fake client leaves posted requests unresolved, which is exactly what
 * the client sees mid-turn when a scripted provider rule carries a delay.
 */

import { beforeEach, describe, expect, it } from "vitest";

import { AppController } from "../src/app.js";
import type { SessionEvent } from "../src/types.js";
import { FakeClient, flushAsync } from "./helpers.js";

const SESSION = "sess-000001";

let client: FakeClient;
let controller: AppController;
let root: HTMLElement;

function input(): HTMLInputElement {
  return root.querySelector(".composer-input") as HTMLInputElement;
}

function stopButton(): HTMLButtonElement {
  return root.querySelector(".stop-button") as HTMLButtonElement;
}

function sendText(text: string): void {
  input().value = text;
  (root.querySelector(".composer") as HTMLFormElement).dispatchEvent(
    new Event("submit", { bubbles: true, cancelable: true }),
  );
}

function event(
  seq: number,
  kind: SessionEvent["event_kind"],
  payload: Record<string, unknown>,
): SessionEvent {
  return {
    event_seq: seq,
    event_kind: kind,
    payload,
    agent: "core",
    session_id: SESSION,
    created_at: "2030-01-01T00:00:00.000Z",
  };
}

beforeEach(() => {
  client = new FakeClient();
  document.body.innerHTML = '<div id="app"></div>';
  root = document.getElementById("app") as HTMLElement;
  controller = new AppController({ client, sessionId: SESSION, root });
});

describe("stop button during an in-flight turn", () => {
  it("locks the composer and shows Stop while the request runs", async () => {
    expect(stopButton().style.display).toBe("none");
    sendText("Write three hero images.");
    await flushAsync();

    expect(client.callsTo("postMessage").length).toBe(1);
    expect(controller.store.state.inFlightRequestId).toBe("req-000001");
    expect(input().disabled).toBe(true);
    expect(stopButton().style.display).not.toBe("none");
  });

  it("cancels the in-flight request and re-enables input afterwards", async () => {
    sendText("Write three hero images.");
    await flushAsync();
    expect(input().disabled).toBe(true);

    stopButton().click();
    await flushAsync();

    const cancels = client.callsTo("cancelRequest");
    expect(cancels.length).toBe(1);
    expect(cancels[0]?.args).toEqual([SESSION, "req-000001"]);

    // The engine lands on a safe point, rolls back, and reports the turn.
    await controller.applyEvent(
      event(0, "chat-message", {
        speaker: "user",
        text: "Write three hero images.",
        request_id: "req-000001",
      }),
    );
    await controller.applyEvent(
      event(1, "error", {
        request_id: "req-000001",
        code: "request-cancelled",
        message: "cancelled at safe point",
      }),
    );
    await controller.applyEvent(
      event(2, "done", { request_id: "req-000001", status: "cancelled" }),
    );

    expect(controller.store.state.inFlightRequestId).toBeNull();
    expect(input().disabled).toBe(false);
    expect(stopButton().style.display).toBe("none");
  });

  it("only sends one cancel even when pressed repeatedly", async () => {
    sendText("Write three hero images.");
    await flushAsync();
    stopButton().click();
    stopButton().click();
    await flushAsync();
    stopButton().click();
    await flushAsync();
    expect(client.callsTo("cancelRequest").length).toBe(1);
  });

  it("ignores Stop when nothing is in flight", async () => {
    stopButton().click();
    await flushAsync();
    expect(client.callsTo("cancelRequest").length).toBe(0);
  });

  it("clears the pending selection once the message is posted", async () => {
    controller.view.selection = {
      block_id: "blk-000001",
      version_index: 0,
      element_ids: [],
    };
    sendText("Continue from the selected concept.");
    await flushAsync();
    const posted = client.callsTo("postMessage")[0];
    expect(posted?.args[2]).toEqual({
      block_id: "blk-000001",
      version_index: 0,
      element_ids: [],
    });
    expect(controller.view.selection).toBeNull();
  });
});
