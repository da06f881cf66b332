/**
 * Client-only view state: which boards are open, where each camera sits,
 * and what the user has selected to send with the next message.
 *
 * Invariants kept here by construction:
 *  - at most one board is expanded at a time (single field);
 *  - a selection names one block/version plus element ids within it;
 *  - the selection is cleared once the message carrying it is posted.
 */

import type { EngineClient } from "./client.js";
import type { CardState } from "./store.js";
import type { StageName, WireBlock, WireSelection } from "./types.js";

export interface Camera {
  x: number;
  y: number;
  zoom: number;
}

export interface ViewState {
  expanded: StageName | null;
  /** Camera per board; absent means "auto-center the newest block". */
  cameras: Partial<Record<StageName, Camera>>;
  selection: WireSelection | null;
  connection: "connecting" | "open" | "retrying" | "idle";
}

export function initialViewState(): ViewState {
  return {
    expanded: null,
    cameras: {},
    selection: null,
    connection: "idle",
  };
}

export function expandBoard(view: ViewState, stage: StageName): void {
  view.expanded = stage;
}

export function collapseBoard(view: ViewState): void {
  view.expanded = null;
}

export function toggleExpanded(view: ViewState, stage: StageName): void {
  view.expanded = view.expanded === stage ? null : stage;
}

export function setCamera(view: ViewState, stage: StageName, camera: Camera): void {
  view.cameras[stage] = camera;
}

/** Select a block at a version; reselecting the same block deselects it. */
export function selectBlock(
  view: ViewState,
  blockId: string,
  versionIndex: number,
): void {
  if (view.selection?.block_id === blockId) {
    view.selection = null;
    return;
  }
  view.selection = { block_id: blockId, version_index: versionIndex, element_ids: [] };
}

/** Toggle one element within the current selection; no-op without one. */
export function toggleElement(view: ViewState, elementId: string): void {
  const selection = view.selection;
  if (!selection) {
    return;
  }
  const at = selection.element_ids.indexOf(elementId);
  if (at >= 0) {
    selection.element_ids.splice(at, 1);
  } else {
    selection.element_ids.push(elementId);
  }
}

export function clearSelection(view: ViewState): void {
  view.selection = null;
}

/**
 * Collapse every card on screen except pinned ones, via the server (board
 * state is never mutated locally). Returns the server's updated blocks.
 */
export async function collapseAllExceptPinned(
  client: EngineClient,
  sessionId: string,
  cards: Iterable<CardState>,
): Promise<WireBlock[]> {
  const updated: WireBlock[] = [];
  for (const card of cards) {
    const detail = card.detail;
    if (!detail || detail.pinned || detail.collapsed) {
      continue;
    }
    updated.push(await client.setCollapsed(sessionId, card.blockId, true));
  }
  return updated;
}
