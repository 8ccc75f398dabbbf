// Wire protocol types and parsing for the captioncast session service.
// One JSON object per socket message: {type, payload, msg_id}.

export type Role = "face_dhh" | "face_hearing" | "control";

export type MessageType =
  | "hello"
  | "frame"
  | "control"
  | "config"
  | "ack"
  | "error"
  | "bye";

export interface WireMessage {
  type: MessageType;
  payload: Record<string, unknown>;
  msg_id: number;
}

export interface LinePayload {
  utterance_id: string;
  retracted: boolean;
  graphemes: string[];
  reveal_offsets_ms: number[];
}

export interface FramePayload {
  face: "dhh" | "hearing";
  mirrored: boolean;
  scale: number;
  frame_ts: number;
  config_rev: number;
  lines: LinePayload[];
}

export interface ConfigPayload {
  char_size_pt: number;
  color_rgba: [number, number, number, number];
  opacity: number;
  font_id: string;
  reveal_rate: number;
  max_lines: number;
  line_width: number;
  linger_ms: number;
  retract_linger_ms: number;
  mirror_scale: number;
  config_rev: number;
}

export type ControlAction = "retract_last" | "retract_id" | "config_patch" | "clear";

export function parseMessage(raw: string): WireMessage | null {
  let obj: unknown;
  try {
    obj = JSON.parse(raw);
  } catch {
    return null;
  }
  if (typeof obj !== "object" || obj === null) return null;
  const m = obj as Record<string, unknown>;
  if (typeof m.type !== "string" || typeof m.msg_id !== "number") return null;
  if (typeof m.payload !== "object" || m.payload === null) return null;
  return m as unknown as WireMessage;
}

/** Validate a frame payload; null means "skip this frame, keep the last". */
export function parseFrame(payload: Record<string, unknown>): FramePayload | null {
  if (payload.face !== "dhh" && payload.face !== "hearing") return null;
  if (typeof payload.mirrored !== "boolean") return null;
  if (typeof payload.scale !== "number" || typeof payload.frame_ts !== "number") return null;
  if (!Array.isArray(payload.lines)) return null;
  for (const line of payload.lines) {
    if (typeof line !== "object" || line === null) return null;
    const l = line as Record<string, unknown>;
    if (typeof l.utterance_id !== "string" || typeof l.retracted !== "boolean") return null;
    if (!Array.isArray(l.graphemes) || !Array.isArray(l.reveal_offsets_ms)) return null;
    if (l.graphemes.length !== l.reveal_offsets_ms.length) return null;
  }
  return payload as unknown as FramePayload;
}

export function helloMessage(role: Role, msgId: number, sessionId?: string): WireMessage {
  const payload: Record<string, unknown> = { role };
  if (sessionId) payload.session_id = sessionId;
  return { type: "hello", payload, msg_id: msgId };
}

export function controlMessage(
  action: ControlAction,
  args: Record<string, unknown>,
  msgId: number,
): WireMessage {
  return { type: "control", payload: { action, args }, msg_id: msgId };
}
