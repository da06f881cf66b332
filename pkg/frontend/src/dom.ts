/**
 * DOM projection: turns render models into elements and wires user intent
 * back out through a handler object. No state lives here — every update
 * rebuilds the dynamic regions from the model (small scale makes this cheap),
 * while the composer input survives updates so typing is never interrupted.
 */

import type {
  AppModel,
  BoardViewModel,
  CardModel,
  ChatMessageModel,
  EdgeModel,
  ElementModel,
} from "./render.js";
import type { StageName } from "./types.js";

export interface UiHandlers {
  onSend(text: string): void;
  onStop(): void;
  onAnswerApproval(answer: "yes" | "no"): void;
  onSelectVersion(blockId: string, versionIndex: number): void;
  onSelectBlock(blockId: string, versionIndex: number): void;
  onToggleElement(blockId: string, elementId: string): void;
  onTogglePinned(blockId: string, pinned: boolean): void;
  onToggleCollapsed(blockId: string, collapsed: boolean): void;
  onToggleExpanded(stage: StageName): void;
  onCollapseAll(): void;
  assetUrl(ref: string): string;
}

export interface UiHandle {
  update(model: AppModel): void;
}

function el<K extends keyof HTMLElementTagNameMap>(
  tag: K,
  className?: string,
  text?: string,
): HTMLElementTagNameMap[K] {
  const node = document.createElement(tag);
  if (className) {
    node.className = className;
  }
  if (text !== undefined) {
    node.textContent = text;
  }
  return node;
}

function renderChatMessage(message: ChatMessageModel): HTMLElement {
  const item = el("div", `chat-message chat-${message.align}`);
  item.dataset["seq"] = String(message.key);
  item.dataset["speaker"] = message.speaker;
  item.append(
    el("div", "chat-label", message.label),
    el("div", "chat-text", message.text),
  );
  return item;
}

function renderElement(
  card: CardModel,
  element: ElementModel,
  handlers: UiHandlers,
): HTMLElement {
  const node = el(
    "div",
    `card-element${element.selected ? " selected" : ""}${element.known ? "" : " unknown-kind"}`,
  );
  node.dataset["elementId"] = element.elementId;
  node.dataset["kind"] = element.kind;
  if (element.heading) {
    node.append(el("div", "element-heading", element.heading));
  }
  if (element.imageRef) {
    const image = el("img", "element-image");
    image.src = handlers.assetUrl(element.imageRef);
    image.alt = element.heading || element.kind;
    node.append(image);
  }
  if (element.body) {
    node.append(el("div", "element-body", element.body));
  }
  node.addEventListener("click", (pointer) => {
    pointer.stopPropagation();
    handlers.onToggleElement(card.blockId, element.elementId);
  });
  return node;
}

function renderVersionSwitcher(card: CardModel, handlers: UiHandlers): HTMLElement {
  const row = el("div", "version-switcher");
  row.dataset["blockId"] = card.blockId;
  for (let index = 0; index < card.versions.count; index += 1) {
    const button = el(
      "button",
      `version-button${index === card.versions.active ? " active" : ""}`,
      `v${index}`,
    );
    button.dataset["versionIndex"] = String(index);
    button.addEventListener("click", (pointer) => {
      pointer.stopPropagation();
      handlers.onSelectVersion(card.blockId, index);
    });
    row.append(button);
  }
  return row;
}

function renderCard(card: CardModel, handlers: UiHandlers): HTMLElement {
  const node = el(
    "div",
    "block-card" +
      (card.selected ? " selected" : "") +
      (card.canonical ? " canonical" : "") +
      (card.collapsed ? " collapsed" : "") +
      (card.loading ? " loading" : ""),
  );
  node.dataset["blockId"] = card.blockId;
  node.dataset["kind"] = card.kind;
  node.style.left = `${card.x}px`;
  node.style.top = `${card.y}px`;

  const header = el("div", "card-header");
  header.append(el("span", "card-title", card.title));
  const pin = el("button", `pin-button${card.pinned ? " pinned" : ""}`, "⚲");
  pin.title = card.pinned ? "unpin" : "pin";
  pin.addEventListener("click", (pointer) => {
    pointer.stopPropagation();
    handlers.onTogglePinned(card.blockId, !card.pinned);
  });
  const fold = el("button", "fold-button", card.collapsed ? "+" : "−");
  fold.title = card.collapsed ? "expand" : "collapse";
  fold.addEventListener("click", (pointer) => {
    pointer.stopPropagation();
    handlers.onToggleCollapsed(card.blockId, !card.collapsed);
  });
  header.append(pin, fold);
  node.append(header);

  node.append(renderVersionSwitcher(card, handlers));

  if (!card.collapsed) {
    const bodyNode = el("div", "card-body");
    for (const element of card.elements) {
      bodyNode.append(renderElement(card, element, handlers));
    }
    node.append(bodyNode);
  }
  if (card.loading) {
    node.append(el("div", "card-loading", "loading…"));
  }
  node.addEventListener("click", () =>
    handlers.onSelectBlock(card.blockId, card.versions.active),
  );
  return node;
}

const SVG_NS = "http://www.w3.org/2000/svg";

function renderEdges(edges: EdgeModel[]): SVGSVGElement {
  const svg = document.createElementNS(SVG_NS, "svg");
  svg.setAttribute("class", "edge-layer");
  for (const edge of edges) {
    const line = document.createElementNS(SVG_NS, "line");
    line.setAttribute("x1", String(edge.x1));
    line.setAttribute("y1", String(edge.y1));
    line.setAttribute("x2", String(edge.x2));
    line.setAttribute("y2", String(edge.y2));
    line.setAttribute("class", "lineage-edge");
    line.dataset["fromId"] = edge.fromId;
    line.dataset["toId"] = edge.toId;
    svg.append(line);
  }
  return svg;
}

function renderBoard(board: BoardViewModel, handlers: UiHandlers): HTMLElement {
  const node = el(
    "section",
    "board" +
      (board.current ? " current" : "") +
      (board.expanded ? " expanded" : ""),
  );
  node.dataset["stage"] = board.stage;

  const header = el("header", "board-header");
  header.append(el("h2", "board-title", `${board.stage} board`));
  const grow = el("button", "expand-button", board.expanded ? "⤡" : "⤢");
  grow.title = board.expanded ? "shrink" : "expand";
  grow.addEventListener("click", () => handlers.onToggleExpanded(board.stage));
  header.append(grow);
  node.append(header);

  const canvas = el("div", "board-canvas");
  const surface = el("div", "board-surface");
  const camera = board.camera;
  surface.style.transform = `translate(${-camera.x * camera.zoom}px, ${-camera.y * camera.zoom}px) scale(${camera.zoom})`;
  surface.append(renderEdges(board.edges));
  for (const card of board.cards) {
    surface.append(renderCard(card, handlers));
  }
  canvas.append(surface);
  node.append(canvas);
  return node;
}

/**
 * Mount the application shell into `root`. Static chrome (composer, stop
 * button) is created once; `update` re-renders chat, boards and status.
 */
export function mountApp(root: HTMLElement, handlers: UiHandlers): UiHandle {
  root.replaceChildren();
  root.className = "app";

  const topBar = el("div", "top-bar");
  const stageLabel = el("span", "stage-label");
  const statusLine = el("span", "status-line");
  const banner = el("span", "connection-banner");
  topBar.append(stageLabel, statusLine, banner);

  const chatPane = el("div", "chat-pane");
  const chatLog = el("div", "chat-log");
  const approvalBar = el("div", "approval-bar");
  const yesButton = el("button", "approve-button", "Yes, proceed");
  yesButton.addEventListener("click", () => handlers.onAnswerApproval("yes"));
  const noButton = el("button", "reject-button", "No");
  noButton.addEventListener("click", () => handlers.onAnswerApproval("no"));
  approvalBar.append(yesButton, noButton);

  const composer = el("form", "composer");
  const selectionTag = el("span", "selection-tag");
  const input = el("input", "composer-input");
  input.type = "text";
  input.placeholder = "Tell the director's assistant what to do…";
  const send = el("button", "send-button", "Send");
  send.type = "submit";
  const stop = el("button", "stop-button", "Stop");
  stop.type = "button";
  stop.addEventListener("click", () => handlers.onStop());
  composer.append(selectionTag, input, send, stop);
  composer.addEventListener("submit", (event) => {
    event.preventDefault();
    const text = input.value.trim();
    if (text) {
      input.value = "";
      handlers.onSend(text);
    }
  });

  chatPane.append(chatLog, approvalBar, composer);

  const boardsPane = el("div", "boards-pane");
  const boardsBar = el("div", "boards-bar");
  const collapseAll = el("button", "collapse-all-button", "Collapse all");
  collapseAll.addEventListener("click", () => handlers.onCollapseAll());
  boardsBar.append(collapseAll);
  const boardsHost = el("div", "boards");
  boardsPane.append(boardsBar, boardsHost);

  root.append(topBar, chatPane, boardsPane);

  return {
    update(model: AppModel) {
      stageLabel.textContent = model.stageLabel;
      statusLine.textContent = model.statusLine;
      banner.textContent = model.connectionBanner ?? "";
      banner.classList.toggle("visible", model.connectionBanner !== null);

      chatLog.replaceChildren(...model.chat.map(renderChatMessage));
      chatLog.scrollTop = chatLog.scrollHeight;

      approvalBar.classList.toggle("visible", model.awaitingApproval);
      yesButton.disabled = model.inputDisabled;
      noButton.disabled = model.inputDisabled;

      input.disabled = model.inputDisabled;
      send.disabled = model.inputDisabled;
      stop.style.display = model.stopVisible ? "" : "none";
      selectionTag.textContent = model.selectionSummary ?? "";
      selectionTag.classList.toggle("visible", model.selectionSummary !== null);

      const expandedBoard = model.boards.find((board) => board.expanded);
      const shown = expandedBoard ? [expandedBoard] : model.boards;
      boardsHost.replaceChildren(
        ...shown.map((board) => renderBoard(board, handlers)),
      );
      boardsHost.classList.toggle("single", Boolean(expandedBoard));
    },
  };
}
