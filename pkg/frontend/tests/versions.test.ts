// @vitest-environment jsdom
/**
 * Version switcher against a recorded two-version block: switching calls the
 * server endpoint, and the card re-renders with the other version's content.
 */

import { beforeEach, describe, expect, it } from "vitest";

import { AppController } from "../src/app.js";
import { isPublicationEvent } from "../src/types.js";
import {
  FakeClient,
  flushAsync,
  loadVersions,
  type VersionsFixtures,
} from "./helpers.js";

const SESSION = "sess-000001";

let fixtures: VersionsFixtures;
let client: FakeClient;
let controller: AppController;
let root: HTMLElement;

beforeEach(async () => {
  fixtures = loadVersions();
  client = new FakeClient({
    blocks: { [fixtures.block.block_id]: fixtures.block },
  });
  document.body.innerHTML = '<div id="app"></div>';
  root = document.getElementById("app") as HTMLElement;
  controller = new AppController({ client, sessionId: SESSION, root });
  for (const event of fixtures.events.filter(isPublicationEvent)) {
    await controller.applyEvent(event);
  }
});

function switcher(): HTMLElement {
  const node = root.querySelector(
    `.version-switcher[data-block-id="${fixtures.block.block_id}"]`,
  );
  expect(node).not.toBeNull();
  return node as HTMLElement;
}

function cardText(): string {
  return (
    root.querySelector(
      `.block-card[data-block-id="${fixtures.block.block_id}"]`,
    )?.textContent ?? ""
  );
}

describe("version switcher", () => {
  it("starts on the block's active version with one button per version", () => {
    const buttons = switcher().querySelectorAll(".version-button");
    expect(buttons.length).toBe(2);
    expect(
      switcher().querySelector(".version-button.active")?.textContent,
    ).toBe("v1");
    // The rewrite (v1) is what the card shows at first.
    expect(cardText()).toContain("gouache");
    expect(cardText()).not.toContain("woodcut");
  });

  it("switches to an older version through the server and re-renders", async () => {
    const v0 = switcher().querySelector(
      '.version-button[data-version-index="0"]',
    ) as HTMLButtonElement;
    v0.click();
    await flushAsync();

    const calls = client.callsTo("setActiveVersion");
    expect(calls.length).toBe(1);
    expect(calls[0]?.args).toEqual([SESSION, fixtures.block.block_id, 0]);

    expect(
      switcher().querySelector(".version-button.active")?.textContent,
    ).toBe("v0");
    expect(cardText()).toContain("woodcut");
    expect(cardText()).not.toContain("gouache");
  });

  it("switches back and forth without losing either version", async () => {
    const press = async (index: number) => {
      (
        switcher().querySelector(
          `.version-button[data-version-index="${index}"]`,
        ) as HTMLButtonElement
      ).click();
      await flushAsync();
    };
    await press(0);
    await press(1);
    expect(cardText()).toContain("gouache");
    await press(0);
    expect(cardText()).toContain("woodcut");
    expect(client.callsTo("setActiveVersion").length).toBe(3);
  });

  it("keeps the card's placement across version switches", async () => {
    const before = (
      root.querySelector(
        `.block-card[data-block-id="${fixtures.block.block_id}"]`,
      ) as HTMLElement
    ).style.left;
    (
      switcher().querySelector(
        '.version-button[data-version-index="0"]',
      ) as HTMLButtonElement
    ).click();
    await flushAsync();
    const after = (
      root.querySelector(
        `.block-card[data-block-id="${fixtures.block.block_id}"]`,
      ) as HTMLElement
    ).style.left;
    expect(after).toBe(before);
  });
});
