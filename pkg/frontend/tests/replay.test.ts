// @vitest-environment jsdom
/**
 * Golden replay: feed the recorded session event log through the full client
 * stack (store fold, hydration via the API surface, DOM projection) and
 * check the resulting screen matches what the live run produced.
 */

import { beforeAll, describe, expect, it } from "vitest";

import { AppController } from "../src/app.js";
import { isChatEvent, isPublicationEvent } from "../src/types.js";
import { FakeClient, loadGolden, type GoldenFixtures } from "./helpers.js";

const SESSION = "sess-000001";

let fixtures: GoldenFixtures;
let client: FakeClient;
let controller: AppController;
let root: HTMLElement;

beforeAll(async () => {
  fixtures = loadGolden();
  client = new FakeClient({
    blocks: fixtures.blocks,
    boards: fixtures.boards,
    events: fixtures.events,
  });
  document.body.innerHTML = '<div id="app"></div>';
  root = document.getElementById("app") as HTMLElement;
  controller = new AppController({ client, sessionId: SESSION, root });
  for (const event of fixtures.events) {
    await controller.applyEvent(event);
  }
});

describe("golden event-log replay", () => {
  it("renders one chat message per chat event, in order", () => {
    const chatEvents = fixtures.events.filter(isChatEvent);
    const rendered = [...root.querySelectorAll(".chat-message")];
    expect(rendered.length).toBe(chatEvents.length);
    chatEvents.forEach((event, index) => {
      const node = rendered[index] as HTMLElement;
      expect(node.dataset["speaker"]).toBe(event.payload.speaker);
      expect(node.querySelector(".chat-text")?.textContent).toBe(
        event.payload.text,
      );
      // Spoken and system sides of the conversation sit apart.
      expect(
        node.classList.contains(
          event.payload.speaker === "user" ? "chat-right" : "chat-left",
        ),
      ).toBe(true);
    });
  });

  it("renders exactly one block card per published block", () => {
    const publishedIds = new Set(
      fixtures.events.filter(isPublicationEvent).map((e) => e.payload.block_id),
    );
    expect(publishedIds.size).toBeGreaterThan(0);
    const cards = [...root.querySelectorAll(".block-card")];
    expect(cards.length).toBe(publishedIds.size);
    for (const blockId of publishedIds) {
      const matches = root.querySelectorAll(
        `.block-card[data-block-id="${blockId}"]`,
      );
      expect(matches.length).toBe(1);
    }
  });

  it("places every card at the server's recorded board position", () => {
    for (const board of Object.values(fixtures.boards)) {
      for (const block of board.blocks) {
        const placement = board.placement[block.block_id];
        expect(placement).toBeDefined();
        const card = root.querySelector(
          `.board[data-stage="${board.stage}"] .block-card[data-block-id="${block.block_id}"]`,
        ) as HTMLElement | null;
        expect(card, `${block.block_id} on ${board.stage}`).not.toBeNull();
        expect(card?.style.left).toBe(`${placement?.[0]}px`);
        expect(card?.style.top).toBe(`${placement?.[1]}px`);
      }
    }
  });

  it("gives every card a version switcher matching its version count", () => {
    for (const [blockId, detail] of Object.entries(fixtures.blocks)) {
      const switcher = root.querySelector(
        `.version-switcher[data-block-id="${blockId}"]`,
      );
      expect(switcher, blockId).not.toBeNull();
      const buttons = switcher?.querySelectorAll(".version-button") ?? [];
      expect(buttons.length).toBe(detail.versions.length);
      const active = switcher?.querySelector(".version-button.active");
      expect(active?.textContent).toBe(`v${detail.active_version}`);
    }
  });

  it("draws the branch edge from the parent concept to its darker child", () => {
    const child = Object.values(fixtures.blocks).find(
      (block) => block.parent_id !== null,
    );
    expect(child).toBeDefined();
    const edge = root.querySelector(
      `.lineage-edge[data-from-id="${child?.parent_id}"][data-to-id="${child?.block_id}"]`,
    );
    expect(edge).not.toBeNull();
  });

  it("ends on the storyboard stage with no request in flight", () => {
    expect(controller.store.state.stage).toBe(fixtures.state.stage);
    expect(
      root.querySelector(".stage-label")?.textContent,
    ).toBe(`stage: ${fixtures.state.stage}`);
    const input = root.querySelector(".composer-input") as HTMLInputElement;
    expect(input.disabled).toBe(false);
  });

  it("renders image elements with asset URLs served by the API", () => {
    const images = [...root.querySelectorAll(".element-image")];
    expect(images.length).toBeGreaterThan(0);
    for (const image of images) {
      expect((image as HTMLImageElement).src).toContain(
        `/sessions/${SESSION}/assets/`,
      );
    }
  });

  it("marks canonical blocks, including the branched story concept", () => {
    // The darker branch child took over as the canonical story concept.
    const child = Object.values(fixtures.blocks).find(
      (block) => block.parent_id !== null,
    );
    const childCard = root.querySelector(
      `.block-card[data-block-id="${child?.block_id}"]`,
    );
    expect(childCard?.classList.contains("canonical")).toBe(true);
    const parentCard = root.querySelector(
      `.block-card[data-block-id="${child?.parent_id}"]`,
    );
    expect(parentCard?.classList.contains("canonical")).toBe(false);
  });

  it("hydrated blocks only through the public block endpoint", () => {
    const fetched = client
      .callsTo("block")
      .map((call) => call.args[1] as string);
    const publishedIds = new Set(
      fixtures.events.filter(isPublicationEvent).map((e) => e.payload.block_id),
    );
    expect(new Set(fetched)).toEqual(publishedIds);
  });
});
