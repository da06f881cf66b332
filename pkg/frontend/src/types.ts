/**
 * Wire types for the pre-production engine's HTTP/SSE API.
 *
 * These mirror the JSON the server emits; field names are the server's,
 * snake_case included, so payloads can be used without translation.
 */

export type StageName =
  | "planning"
  | "ideation"
  | "scripting"
  | "design"
  | "storyboard";

/** Stages that own a board (planning is conversation-only). */
export const BOARD_STAGES: readonly StageName[] = [
  "ideation",
  "scripting",
  "design",
  "storyboard",
];

export type ArtifactKindName =
  | "logline"
  | "story_concept"
  | "world_concept"
  | "style_description"
  | "character_concept"
  | "three_act_structure"
  | "story_outline"
  | "scene_list"
  | "script"
  | "character_sheet"
  | "environment_design"
  | "hero_image"
  | "styleframe"
  | "storyboard_sequence";

/** Home board for each artifact kind; branch children share their parent's kind. */
export const KIND_STAGE: Record<ArtifactKindName, StageName> = {
  logline: "ideation",
  story_concept: "ideation",
  world_concept: "ideation",
  style_description: "ideation",
  character_concept: "ideation",
  three_act_structure: "scripting",
  story_outline: "scripting",
  scene_list: "scripting",
  script: "scripting",
  character_sheet: "design",
  environment_design: "design",
  hero_image: "design",
  styleframe: "storyboard",
  storyboard_sequence: "storyboard",
};

export interface WireElement {
  element_id: string;
  kind: string;
  text: string | null;
  image_ref: string | null;
  attributes: Record<string, string>;
}

export interface WireVersion {
  version_index: number;
  elements: WireElement[];
  created_at: string;
  origin_task: string;
}

export interface WireBlock {
  block_id: string;
  stage: StageName;
  kind: ArtifactKindName;
  parent_id: string | null;
  versions: WireVersion[];
  active_version: number;
  pinned: boolean;
  collapsed: boolean;
}

/** Block detail endpoint adds where the block sits and its ancestry. */
export interface WireBlockDetail extends WireBlock {
  placement: [number, number] | null;
  lineage: string[];
}

export interface WireBoard {
  stage: StageName;
  blocks: WireBlock[];
  placement: Record<string, [number, number]>;
}

export type EventKindName =
  | "agent-status"
  | "chat-message"
  | "block-published"
  | "block-updated"
  | "stage-changed"
  | "approval-request"
  | "error"
  | "done";

export const EVENT_KINDS: readonly EventKindName[] = [
  "agent-status",
  "chat-message",
  "block-published",
  "block-updated",
  "stage-changed",
  "approval-request",
  "error",
  "done",
];

export interface SessionEvent {
  event_seq: number;
  event_kind: EventKindName;
  payload: Record<string, unknown>;
  agent: string;
  session_id: string;
  created_at: string;
}

export interface ChatPayload {
  speaker: string;
  text: string;
  request_id: string;
}

export interface PublicationPayload {
  mode: "new-root" | "child-of" | "overwrite-artifact";
  kind: ArtifactKindName;
  block_id: string;
  version_index: number;
  canonical_changed: boolean;
  task_id: string;
  request_id: string;
}

export interface StageChangePayload {
  from_stage: StageName;
  to_stage: StageName;
  request_id: string;
}

export interface AgentStatusPayload {
  state: string;
  request_id: string;
  role?: string;
  task_id?: string;
  kind?: string;
  round?: number;
  verdict?: string;
  slot?: number;
}

export interface DonePayload {
  request_id: string;
  status: "done" | "failed" | "cancelled";
}

export interface ErrorPayload {
  request_id: string;
  code: string;
  message: string;
}

/** Oversized payloads arrive replaced by this stub; render them as a notice. */
export interface TruncatedPayload {
  truncated: true;
  original_bytes: number;
  request_id: string | null;
}

export function isTruncated(
  payload: Record<string, unknown>,
): payload is TruncatedPayload & Record<string, unknown> {
  return payload["truncated"] === true;
}

export function isChatEvent(
  event: SessionEvent,
): event is SessionEvent & { payload: ChatPayload & Record<string, unknown> } {
  return event.event_kind === "chat-message" && !isTruncated(event.payload);
}

export function isPublicationEvent(
  event: SessionEvent,
): event is SessionEvent & {
  payload: PublicationPayload & Record<string, unknown>;
} {
  return (
    (event.event_kind === "block-published" ||
      event.event_kind === "block-updated") &&
    !isTruncated(event.payload)
  );
}

export interface SessionStateResponse {
  session_id: string;
  stage: StageName;
  busy: boolean;
  open_channel: string | null;
  awaiting_approval: boolean;
  progress: {
    canonical: Record<string, string | null>;
    stage_status: Record<StageName, string>;
    project_brief: string;
  };
  event_count: number;
}

export interface RequestStatusResponse {
  request_id: string;
  status: "accepted" | "running" | "done" | "failed" | "cancelled" | string;
  error: Record<string, unknown> | null;
}

export interface WireSelection {
  block_id: string;
  version_index: number;
  element_ids: string[];
}
