/**
 * Pure render models: plain data describing exactly what the DOM layer
 * should show, built from (event-fold state, view state) with no IO.
 *
 * Keeping this layer pure means the whole UI for a given event-log prefix
 * can be asserted in tests without a browser: same inputs, same models.
 */

import type { CardState, StoreState } from "./store.js";
import type { ViewState } from "./view.js";
import type {
  StageName,
  WireElement,
} from "./types.js";
import { BOARD_STAGES } from "./types.js";

/** Card geometry; placements come from the server, sizes are presentation. */
export const CARD_WIDTH = 320;
export const CARD_HEIGHT = 240;

export interface ChatMessageModel {
  key: number;
  speaker: string;
  /** Chat alignment: the user's own messages sit on the right. */
  align: "left" | "right";
  label: string;
  text: string;
}

export interface ElementModel {
  elementId: string;
  kind: string;
  heading: string;
  body: string;
  imageRef: string | null;
  selected: boolean;
  /** False for element kinds this client has no template for (raw display). */
  known: boolean;
}

export interface VersionSwitcherModel {
  blockId: string;
  count: number;
  active: number;
}

export interface CardModel {
  blockId: string;
  kind: string;
  title: string;
  x: number;
  y: number;
  pinned: boolean;
  collapsed: boolean;
  canonical: boolean;
  selected: boolean;
  loading: boolean;
  versions: VersionSwitcherModel;
  elements: ElementModel[];
}

export interface EdgeModel {
  fromId: string;
  toId: string;
  x1: number;
  y1: number;
  x2: number;
  y2: number;
}

export interface BoardViewModel {
  stage: StageName;
  current: boolean;
  expanded: boolean;
  cards: CardModel[];
  edges: EdgeModel[];
  camera: { x: number; y: number; zoom: number };
}

export interface AppModel {
  stageLabel: string;
  statusLine: string;
  connectionBanner: string | null;
  chat: ChatMessageModel[];
  boards: BoardViewModel[];
  inputDisabled: boolean;
  stopVisible: boolean;
  awaitingApproval: boolean;
  selectionSummary: string | null;
}

/** Element kinds this client renders with a dedicated template. */
const KNOWN_ELEMENT_KINDS = new Set([
  "text-field",
  "concept-option",
  "style-option",
  "character-option",
  "outline-entry",
  "scene-entry",
  "shot-panel",
  "image-asset",
]);

/** Attribute used as the heading, per element kind. */
const HEADING_ATTRIBUTE: Record<string, string> = {
  "concept-option": "title",
  "style-option": "name",
  "character-option": "name",
  "outline-entry": "beat",
  "scene-entry": "scene_number",
  "shot-panel": "shot_number",
  "image-asset": "name",
};

export function buildElementModel(
  element: WireElement,
  selectedIds: ReadonlySet<string>,
): ElementModel {
  const known = KNOWN_ELEMENT_KINDS.has(element.kind);
  let heading = "";
  let body = element.text ?? "";
  if (known) {
    const attribute = HEADING_ATTRIBUTE[element.kind];
    if (attribute && element.attributes[attribute]) {
      heading =
        element.kind === "scene-entry"
          ? `Scene ${element.attributes[attribute]}`
          : element.kind === "shot-panel"
            ? `Shot ${element.attributes[attribute]}`
            : element.attributes[attribute];
    }
    if (element.kind === "scene-entry" && element.attributes["location"]) {
      heading += ` — ${element.attributes["location"]}`;
    }
  } else {
    // Unknown kinds degrade to a raw dump so nothing is silently dropped.
    heading = element.kind;
    const attrs = JSON.stringify(element.attributes);
    body = [element.text ?? "", attrs === "{}" ? "" : attrs]
      .filter(Boolean)
      .join("\n");
  }
  return {
    elementId: element.element_id,
    kind: element.kind,
    heading,
    body,
    imageRef: element.image_ref,
    selected: selectedIds.has(element.element_id),
    known,
  };
}

function titleFor(card: CardState): string {
  const kindLabel = card.kind.replace(/_/g, " ");
  return `${kindLabel} · ${card.blockId}`;
}

export function buildCardModel(
  card: CardState,
  store: StoreState,
  view: ViewState,
): CardModel {
  const detail = card.detail;
  const selection = view.selection;
  const selectedIds = new Set(
    selection?.block_id === card.blockId ? selection.element_ids : [],
  );
  const placement = detail?.placement ?? [0, 0];
  const active = detail?.active_version ?? 0;
  const version = detail?.versions[active];
  return {
    blockId: card.blockId,
    kind: card.kind,
    title: titleFor(card),
    x: placement[0],
    y: placement[1],
    pinned: detail?.pinned ?? false,
    collapsed: detail?.collapsed ?? false,
    canonical: store.canonical.get(card.kind) === card.blockId,
    selected: selection?.block_id === card.blockId,
    loading: detail === null,
    versions: {
      blockId: card.blockId,
      count: detail?.versions.length ?? 0,
      active,
    },
    elements: (version?.elements ?? []).map((element) =>
      buildElementModel(element, selectedIds),
    ),
  };
}

function centerOn(card: CardModel): { x: number; y: number; zoom: number } {
  return { x: card.x + CARD_WIDTH / 2, y: card.y + CARD_HEIGHT / 2, zoom: 1 };
}

export function buildBoardModel(
  stage: StageName,
  store: StoreState,
  view: ViewState,
): BoardViewModel {
  const cards = [...store.cards.values()]
    .filter((card) => card.stage === stage)
    .sort((a, b) => (a.blockId < b.blockId ? -1 : 1))
    .map((card) => buildCardModel(card, store, view));
  const byId = new Map(cards.map((card) => [card.blockId, card]));
  const edges: EdgeModel[] = [];
  for (const card of cards) {
    const parentId = store.cards.get(card.blockId)?.detail?.parent_id;
    const parent = parentId ? byId.get(parentId) : undefined;
    if (parent) {
      edges.push({
        fromId: parent.blockId,
        toId: card.blockId,
        x1: parent.x + CARD_WIDTH,
        y1: parent.y + CARD_HEIGHT / 2,
        x2: card.x,
        y2: card.y + CARD_HEIGHT / 2,
      });
    }
  }
  const newest = store.newestBlockId ? byId.get(store.newestBlockId) : undefined;
  const camera =
    view.cameras[stage] ??
    (newest ? centerOn(newest) : { x: 0, y: 0, zoom: 1 });
  return {
    stage,
    current: store.stage === stage,
    expanded: view.expanded === stage,
    cards,
    edges,
    camera,
  };
}

export function buildChatModel(store: StoreState): ChatMessageModel[] {
  return store.chat.map((item) => ({
    key: item.seq,
    speaker: item.speaker,
    align: item.speaker === "user" ? "right" : "left",
    label: item.speaker === "assistant" ? "director's assistant" : item.speaker,
    text: item.text,
  }));
}

export function buildAppModel(store: StoreState, view: ViewState): AppModel {
  const streaming = store.inFlightRequestId !== null;
  const selection = view.selection;
  return {
    stageLabel: `stage: ${store.stage}`,
    statusLine: store.statusLine,
    connectionBanner:
      view.connection === "retrying"
        ? "connection lost — reconnecting…"
        : null,
    chat: buildChatModel(store),
    boards: BOARD_STAGES.map((stage) => buildBoardModel(stage, store, view)),
    inputDisabled: streaming,
    stopVisible: streaming,
    awaitingApproval: store.awaitingApproval,
    selectionSummary: selection
      ? `${selection.block_id} v${selection.version_index}` +
        (selection.element_ids.length
          ? ` (${selection.element_ids.length} element${
              selection.element_ids.length === 1 ? "" : "s"
            })`
          : "")
      : null,
  };
}
