// Control channel: one in-flight command per widget, acked by msg_id.

import { controlMessage, type ControlAction, type WireMessage } from "./protocol.js";

export interface AckResult {
  ok: boolean;
  payload: Record<string, unknown>;
}

const ACK_TIMEOUT_MS = 3000;

/**
 * Tracks outstanding control commands. Every control message gets
 * exactly one ack or error carrying the same msg_id; a 3 s timeout
 * re-enables the widget with a warning instead of wedging it.
 */
export class ControlChannel {
  private nextMsgId = 1;
  private pending = new Map<number, { resolve: (r: AckResult) => void; timer: number }>();

  constructor(private send: (msg: WireMessage) => void) {}

  sendControl(action: ControlAction, args: Record<string, unknown> = {}): Promise<AckResult> {
    const msgId = this.nextMsgId++;
    return new Promise<AckResult>((resolve) => {
      const timer = setTimeout(() => {
        this.pending.delete(msgId);
        resolve({ ok: false, payload: { code: "timeout", message: "no reply within 3 s" } });
      }, ACK_TIMEOUT_MS) as unknown as number;
      this.pending.set(msgId, { resolve, timer });
      this.send(controlMessage(action, args, msgId));
    });
  }

  /** Route an incoming ack/error; returns true when it was ours. */
  handleReply(message: WireMessage): boolean {
    if (message.type !== "ack" && message.type !== "error") return false;
    const entry = this.pending.get(message.msg_id);
    if (!entry) return false;
    this.pending.delete(message.msg_id);
    clearTimeout(entry.timer);
    entry.resolve({ ok: message.type === "ack", payload: message.payload });
    return true;
  }

  /** Fail everything outstanding (connection dropped). */
  abortAll(): void {
    for (const [msgId, entry] of this.pending) {
      clearTimeout(entry.timer);
      entry.resolve({ ok: false, payload: { code: "disconnected", message: "connection lost" } });
      this.pending.delete(msgId);
    }
  }
}
