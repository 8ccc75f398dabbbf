// Reconnecting session socket with exponential backoff.
//
// 0.5 s base, doubling to an 8 s cap. The server re-sends a full frame
// on registration, so recovery needs no client-side state. A "bye" with
// reason "displaced" is terminal: another client took this face, so
// auto-reconnecting would just fight it.

import { helloMessage, parseMessage, type Role, type WireMessage } from "./protocol.js";

const BASE_DELAY_MS = 500;
const MAX_DELAY_MS = 8000;

export type ConnectionState = "connecting" | "open" | "retrying" | "displaced" | "closed";

export interface SessionHooks {
  onMessage: (message: WireMessage) => void;
  onState: (state: ConnectionState, detail?: string) => void;
}

export class ReconnectingSession {
  private socket: WebSocket | null = null;
  private attempts = 0;
  private stopped = false;
  private helloId = 0;

  constructor(
    private url: string,
    private role: Role,
    private hooks: SessionHooks,
    private makeSocket: (url: string) => WebSocket = (u) => new WebSocket(u),
  ) {}

  connect(): void {
    if (this.stopped) return;
    this.hooks.onState(this.attempts === 0 ? "connecting" : "retrying");
    const socket = this.makeSocket(this.url);
    this.socket = socket;

    socket.onopen = () => {
      this.attempts = 0;
      socket.send(JSON.stringify(helloMessage(this.role, ++this.helloId)));
      this.hooks.onState("open");
    };

    socket.onmessage = (event: MessageEvent) => {
      const message = parseMessage(String(event.data));
      if (!message) return;
      if (message.type === "bye" && message.payload.reason === "displaced") {
        this.stopped = true;
        this.hooks.onState("displaced", "another client took this face");
        socket.close();
        return;
      }
      this.hooks.onMessage(message);
    };

    socket.onclose = () => {
      if (this.stopped) {
        this.hooks.onState("closed");
        return;
      }
      const delay = Math.min(BASE_DELAY_MS * 2 ** this.attempts, MAX_DELAY_MS);
      this.attempts += 1;
      this.hooks.onState("retrying", `reconnecting in ${delay} ms`);
      setTimeout(() => this.connect(), delay);
    };
  }

  send(message: WireMessage): void {
    if (this.socket && this.socket.readyState === WebSocket.OPEN) {
      this.socket.send(JSON.stringify(message));
    }
  }

  close(): void {
    this.stopped = true;
    this.socket?.close();
  }

  /** Backoff schedule for a given retry attempt (test hook). */
  static delayFor(attempt: number): number {
    return Math.min(BASE_DELAY_MS * 2 ** attempt, MAX_DELAY_MS);
  }
}
